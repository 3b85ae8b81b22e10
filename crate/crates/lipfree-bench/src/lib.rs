//! Shared fixtures for the benchmarks: deterministic spaces and mass
//! distributions at a few representative sizes.

use lipfree_core::generate::{generate_space, instance_rng, random_free_vector, SpaceKind};
use lipfree_core::{FreeVector, SpaceRef};

pub const BENCH_SEED: u64 = 7;

pub fn cloud(n: usize) -> SpaceRef {
    generate_space(SpaceKind::EuclideanCloud, n, BENCH_SEED).expect("bench space")
}

pub fn shortest_path_metric(n: usize) -> SpaceRef {
    generate_space(SpaceKind::RandomMetric, n, BENCH_SEED).expect("bench space")
}

pub fn dense_vector(space: &SpaceRef) -> FreeVector {
    random_free_vector(space, &mut instance_rng(BENCH_SEED, 1))
}
