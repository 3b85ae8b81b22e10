//! The two worked isometries: the free space over the integer half-line is
//! the space of absolutely summable sequences via the cumulative map, and
//! the free space over points of the half-line is the space of integrable
//! step functions. Both reduce the transport norm to a cumulative-sum
//! oracle, checked against the solver on random data.

use lipfree_core::generate::{generate_space, instance_rng, random_free_vector, SpaceKind};
use lipfree_core::{l1_isometry_values, line_isometry_values, FreeVector};
use proptest::prelude::*;

const EQ_TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_line_norm_equals_l1_of_cumulative_image(
        n in 1usize..=20,
        seed in any::<u64>(),
    ) {
        let space = generate_space(SpaceKind::IntegerLine, n, seed).unwrap();
        let gamma = random_free_vector(&space, &mut instance_rng(seed, 0));
        let (flow, l1) = l1_isometry_values(&gamma).unwrap();
        prop_assert!((flow - l1).abs() <= EQ_TOL * (1.0 + flow));
    }

    #[test]
    fn line_norm_equals_l1_of_step_image(
        n in 2usize..=20,
        seed in any::<u64>(),
    ) {
        let space = generate_space(SpaceKind::Line, n, seed).unwrap();
        let coords: Vec<f64> = (0..space.n()).map(|x| space.base_dist(x)).collect();
        let gamma = random_free_vector(&space, &mut instance_rng(seed, 1));
        let (flow, l1) = line_isometry_values(&coords, &gamma).unwrap();
        prop_assert!((flow - l1).abs() <= EQ_TOL * (1.0 + flow));
    }
}

#[test]
fn dirac_masses_map_to_unit_blocks() {
    let space = generate_space(SpaceKind::IntegerLine, 20, 0).unwrap();
    for k in 1..=20 {
        let (flow, l1) = l1_isometry_values(&FreeVector::dirac(&space, k)).unwrap();
        assert_eq!(flow, k as f64);
        assert_eq!(l1, k as f64);
    }
}
