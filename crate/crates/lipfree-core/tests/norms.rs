//! Norm-level invariants of the free space: strong duality between the
//! transport solver and the LP over potentials, the norm axioms, the
//! isometric embedding of the space, restriction isometry, and operator-norm
//! domination.

use lipfree_core::generate::{
    generate_space, instance_rng, random_free_vector, random_sparse_vector, SpaceKind,
};
use lipfree_core::{dual_norm, free_norm, FreeVector, LinearFreeMap, LipschitzFunction};
use proptest::prelude::*;

const EQ_TOL: f64 = 1e-9;

fn space_strategy(max_size: usize) -> impl Strategy<Value = (SpaceKind, usize, u64)> {
    (0..SpaceKind::ALL.len(), 2..=max_size, any::<u64>())
        .prop_map(|(k, size, seed)| (SpaceKind::ALL[k], size, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn transport_value_matches_lp_dual((kind, size, seed) in space_strategy(16)) {
        let space = generate_space(kind, size, seed).unwrap();
        let mut rng = instance_rng(seed, 1);
        let gamma = random_free_vector(&space, &mut rng);
        let primal = free_norm(&gamma);
        let (dual, witness) = dual_norm(&gamma).unwrap();
        prop_assert!((primal - dual).abs() <= EQ_TOL * (1.0 + primal.abs()),
            "gap {} on {} ({:?})", primal - dual, space, kind);
        prop_assert!(witness.lip_norm() <= 1.0 + EQ_TOL);
    }

    #[test]
    fn norm_is_absolutely_homogeneous((kind, size, seed) in space_strategy(14), c in -4.0f64..4.0) {
        let space = generate_space(kind, size, seed).unwrap();
        let mut rng = instance_rng(seed, 2);
        let gamma = random_free_vector(&space, &mut rng);
        let lhs = free_norm(&gamma.scale(c));
        let rhs = c.abs() * free_norm(&gamma);
        prop_assert!((lhs - rhs).abs() <= EQ_TOL * (1.0 + rhs));
    }

    #[test]
    fn norm_is_subadditive((kind, size, seed) in space_strategy(14)) {
        let space = generate_space(kind, size, seed).unwrap();
        let mut rng = instance_rng(seed, 3);
        let a = random_free_vector(&space, &mut rng);
        let b = random_sparse_vector(&space, &mut rng);
        prop_assert!(free_norm(&a.add(&b)) <= free_norm(&a) + free_norm(&b) + EQ_TOL);
    }

    #[test]
    fn embedding_is_isometric((kind, size, seed) in space_strategy(12)) {
        let space = generate_space(kind, size, seed).unwrap();
        for x in 0..space.n() {
            for y in (x + 1)..space.n() {
                let molecule = FreeVector::dirac(&space, x).sub(&FreeVector::dirac(&space, y));
                prop_assert_eq!(free_norm(&molecule), space.dist(x, y));
            }
        }
    }

    #[test]
    fn norm_restricts_isometrically((kind, size, seed) in space_strategy(12)) {
        // Free-space norms do not change when computed inside a subspace
        // containing the support and the base point.
        let space = generate_space(kind, size, seed).unwrap();
        let mut rng = instance_rng(seed, 4);
        let gamma = random_sparse_vector(&space, &mut rng);
        let mut keep = gamma.support();
        if !keep.contains(&0) {
            keep.insert(0, 0);
        }
        let sub = std::sync::Arc::new(space.restrict(&keep).unwrap());
        let coeff: Vec<f64> = keep.iter().map(|&x| gamma.coeff(x)).collect();
        let restricted = FreeVector::from_coeff(&sub, coeff).unwrap();
        let full = free_norm(&gamma);
        let inner = free_norm(&restricted);
        prop_assert!((full - inner).abs() <= EQ_TOL * (1.0 + full));
    }

    #[test]
    fn lip_norm_is_a_seminorm((kind, size, seed) in space_strategy(14), c in -3.0f64..3.0) {
        let space = generate_space(kind, size, seed).unwrap();
        let mut rng = instance_rng(seed, 5);
        let f = lipfree_core::generate::random_function(&space, 5.0, &mut rng);
        let g = lipfree_core::generate::random_function(&space, 5.0, &mut rng);
        let scaled = f.scale(c).lip_norm();
        prop_assert!((scaled - c.abs() * f.lip_norm()).abs() <= 1e-12 * (1.0 + scaled));
        prop_assert!(f.add(&g).lip_norm() <= f.lip_norm() + g.lip_norm() + 1e-12);
        // Restriction never increases the constant.
        let keep: Vec<usize> = (0..space.n()).step_by(2).collect();
        let sub = std::sync::Arc::new(space.restrict(&keep).unwrap());
        let values: Vec<f64> = keep.iter().map(|&x| f.value(x)).collect();
        let restricted = LipschitzFunction::new(&sub, values).unwrap();
        prop_assert!(restricted.lip_norm() <= f.lip_norm() + 1e-12);
    }

    #[test]
    fn operator_norm_dominates_evaluations((kind, size, seed) in space_strategy(10)) {
        let space = generate_space(kind, size, seed).unwrap();
        let target = generate_space(SpaceKind::EuclideanCloud, size.max(2), seed ^ 0x9e37)
            .unwrap();
        let mut rng = instance_rng(seed, 6);
        let columns: Vec<FreeVector> = (1..space.n())
            .map(|_| random_sparse_vector(&target, &mut rng))
            .collect();
        let map = LinearFreeMap::from_images(&space, &target, columns).unwrap();
        let bound = map.operator_norm();
        for trial in 0..8 {
            let gamma = random_free_vector(&space, &mut instance_rng(seed, 7 + trial));
            let denom = free_norm(&gamma);
            if denom <= 1e-9 {
                continue;
            }
            let image = free_norm(&map.apply(&gamma));
            prop_assert!(image / denom <= bound + EQ_TOL * (1.0 + bound));
        }
    }
}

// Deep solver stress against the LP at larger sizes and heavy degeneracy;
// opt in with --ignored.
#[test]
#[ignore]
fn stress_duality_large_and_degenerate() {
    let mut worst = 0.0f64;
    for seed in 0..400u64 {
        let kind = SpaceKind::ALL[(seed as usize) % SpaceKind::ALL.len()];
        let n = 2 + (seed as usize * 7) % 59;
        let space = generate_space(kind, n, seed).unwrap();
        let mut rng = instance_rng(seed, 99);
        for round in 0..3 {
            let gamma = if round == 0 {
                random_free_vector(&space, &mut rng)
            } else {
                random_sparse_vector(&space, &mut rng)
            };
            let primal = free_norm(&gamma);
            let (dual, witness) = dual_norm(&gamma).unwrap();
            let gap = (primal - dual).abs() / (1.0 + primal.abs());
            assert!(gap <= EQ_TOL, "gap {gap} on {kind:?} seed {seed}");
            assert!(witness.lip_norm() <= 1.0 + EQ_TOL);
            worst = worst.max(gap);
        }
    }
    println!("stress worst relative gap: {worst:.3e}");
}

#[test]
fn duality_holds_on_degenerate_integer_lines() {
    // Many ties in the costs; the LP and the transport solver must still
    // agree.
    for seed in 0..20 {
        let space = generate_space(SpaceKind::IntegerLine, 12, seed).unwrap();
        let mut rng = instance_rng(seed, 8);
        let gamma = random_free_vector(&space, &mut rng);
        let primal = free_norm(&gamma);
        let (dual, witness) = dual_norm(&gamma).unwrap();
        assert!(
            (primal - dual).abs() <= EQ_TOL * (1.0 + primal.abs()),
            "gap {} at seed {seed}",
            primal - dual
        );
        assert!(witness.lip_norm() <= 1.0 + EQ_TOL);
    }
}
