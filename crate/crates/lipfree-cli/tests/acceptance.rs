//! Acceptance suite: one test per quantitative guarantee, at full scale and
//! with its tolerance pinned in the assertion. Each test prints a single
//! pass line (visible with --nocapture); a failure panics with the detail.

use std::sync::Arc;

use lipfree_cli::config::{ExperimentConfig, SuiteKind};
use lipfree_cli::suite::run_suite;
use lipfree_core::algebra::{characters, check_submultiplicativity, AlgebraContext, Subspace};
use lipfree_core::free::{dual_norm, free_norm, l1_isometry_values, line_isometry_values};
use lipfree_core::generate::{
    generate_space, instance_rng, random_free_vector, random_function, SpaceKind,
};
use lipfree_core::metric::{LipschitzFunction, PointedMetricSpace, SpaceRef};
use lipfree_core::transform::{
    check_iso_maps, check_sandwich, check_witnesses, functor_map, PointMap,
};
use lipfree_core::{BoundedSpace, WeightFunction};
use rand::seq::SliceRandom;
use rand::Rng;

const SEED: u64 = 42;
const EQ_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;

fn pass(criterion: &str, detail: String) {
    println!("PASS {criterion}: {detail}");
}

fn canonical_weights() -> Vec<(&'static str, WeightFunction)> {
    vec![
        ("identity", WeightFunction::identity()),
        ("shifted", WeightFunction::shifted()),
        ("linear:3", WeightFunction::linear(3.0).unwrap()),
    ]
}

/// Deterministic random spaces for a criterion; `salt` separates criteria.
fn spaces(count: usize, max_n: usize, salt: u64) -> Vec<SpaceRef> {
    (0..count)
        .map(|i| {
            let mut rng = instance_rng(SEED, salt * 100_000 + i as u64);
            let kind = SpaceKind::ALL[i % SpaceKind::ALL.len()];
            let mut n = rng.gen_range(2..=max_n);
            if kind == SpaceKind::IntegerLine {
                n -= 1;
            }
            generate_space(kind, n, rng.gen()).expect("generator")
        })
        .collect()
}

#[test]
fn criterion_01_duality_oracle() {
    let mut worst_gap = 0.0f64;
    let mut worst_lip = 0.0f64;
    for (i, space) in spaces(200, 40, 1).iter().enumerate() {
        let mut rng = instance_rng(SEED, 1_000_000 + i as u64);
        let gamma = random_free_vector(space, &mut rng);
        let primal = free_norm(&gamma);
        let (dual, witness) = dual_norm(&gamma).expect("dual solve");
        let gap = (primal - dual).abs();
        assert!(gap <= EQ_TOL, "duality gap {gap} on instance {i} ({space})");
        let lip = witness.lip_norm();
        assert!(lip <= 1.0 + EQ_TOL, "witness lip {lip} on instance {i}");
        worst_gap = worst_gap.max(gap);
        worst_lip = worst_lip.max(lip);
    }
    pass(
        "criterion 01 duality oracle",
        format!(
            "200 spaces (n <= 40): worst gap {worst_gap:.2e}, worst witness lip {worst_lip:.12}"
        ),
    );
}

#[test]
fn criterion_02_sandwich_bounds() {
    let mut worst = f64::INFINITY;
    for space in &spaces(100, 30, 2) {
        for (_, alpha) in canonical_weights() {
            let b = BoundedSpace::build(space, &alpha).expect("transform");
            let report = check_sandwich(&b, EQ_TOL).expect("sandwich bounds");
            worst = worst
                .min(report.min_lower_slack)
                .min(report.min_upper_slack);
        }
    }
    pass(
        "criterion 02 sandwich bounds",
        format!("3 weights x 100 spaces (n <= 30): worst slack {worst:.2e} >= -1e-9"),
    );
}

#[test]
fn criterion_03_isomorphism_constants() {
    let mut worst_product_margin = f64::INFINITY;
    for space in &spaces(100, 30, 2) {
        for (_, alpha) in canonical_weights() {
            let b = BoundedSpace::build(space, &alpha).expect("transform");
            // The round trip is exact on basis vectors and the norms stay
            // within 1 and 1 + 2K; check_iso_maps fails otherwise.
            let report = check_iso_maps(&b, EQ_TOL).expect("iso constants");
            let bound = 1.0 + 2.0 * alpha.kconst();
            worst_product_margin = worst_product_margin.min(bound - report.p_norm * report.q_norm);
        }
    }
    pass(
        "criterion 03 isomorphism constants",
        format!("QP = id exactly, |Q| <= 1+1e-9, product margin >= {worst_product_margin:.3}"),
    );
}

#[test]
fn criterion_04_submultiplicativity_and_sharpness() {
    let alpha = WeightFunction::linear(3.0).unwrap();
    assert_eq!(
        alpha.product_bound(),
        1.0,
        "constant D(K+2) must be exactly 1"
    );
    let mut max_ratio = 0.0f64;
    for (i, space) in spaces(10, 20, 4).iter().enumerate() {
        let ctx = AlgebraContext::new(space, &alpha);
        let mut rng = instance_rng(SEED, 4_000_000 + i as u64);
        let report = check_submultiplicativity(&ctx, 100, &mut rng, EQ_TOL).expect("product bound");
        max_ratio = max_ratio.max(report.max_ratio);
    }
    assert!(max_ratio <= 1.0 + EQ_TOL);

    // The quadruple {0, 1, 1+eps, 2} with the tent pair achieves the
    // constant up to O(eps).
    let eps = 1e-3;
    let space: SpaceRef =
        Arc::new(PointedMetricSpace::from_line_points(&[0.0, 1.0, 1.0 + eps, 2.0]).unwrap());
    let ctx = AlgebraContext::new(&space, &alpha);
    let f = LipschitzFunction::from_fn(&space, |x| 1.0 - (space.base_dist(x) - 1.0).abs());
    let g = f.scale(-1.0);
    let ratio = ctx.odot(&f, &g).lip_norm() / (f.lip_norm() * g.lip_norm());
    assert!(ratio >= 0.99, "sharpness ratio {ratio}");
    pass(
        "criterion 04 submultiplicativity and sharpness",
        format!("1000 pairs stay under constant 1; sharp quadruple reaches {ratio:.5}"),
    );
}

#[test]
fn criterion_05_algebra_isomorphism() {
    let mut worst = 0.0f64;
    for (i, space) in spaces(100, 15, 5).iter().enumerate() {
        let (_, alpha) = &canonical_weights()[i % 3];
        let ctx = AlgebraContext::new(space, alpha);
        let b = BoundedSpace::build(space, alpha).expect("transform");
        let mut rng = instance_rng(SEED, 5_000_000 + i as u64);
        let f = random_function(space, 2.0, &mut rng);
        let g = random_function(space, 2.0, &mut rng);
        let qf = ctx.q_dual(&b, &f);
        let qg = ctx.q_dual(&b, &g);
        let qfg = ctx.q_dual(&b, &ctx.odot(&f, &g));
        let back = ctx.p_dual(&b, &qf);
        for x in 0..space.n() {
            worst = worst.max((qfg.value(x) - qf.value(x) * qg.value(x)).abs());
            worst = worst.max((back.value(x) - f.value(x)).abs());
        }
    }
    assert!(worst <= ZERO_TOL, "coordinate deviation {worst}");
    pass(
        "criterion 05 algebra isomorphism",
        format!("100 pairs: multiplicativity and round trip exact to {worst:.2e} <= 1e-12"),
    );
}

#[test]
fn criterion_06_unit() {
    let mut worst = 0.0f64;
    for (i, space) in spaces(20, 15, 6).iter().enumerate() {
        for (_, alpha) in canonical_weights() {
            let ctx = AlgebraContext::new(space, &alpha);
            let mut rng = instance_rng(SEED, 6_000_000 + i as u64);
            for _ in 0..5 {
                let f = random_function(space, 2.0, &mut rng);
                let absorbed = ctx.odot(&ctx.unit(), &f);
                for x in 0..space.n() {
                    worst = worst.max((absorbed.value(x) - f.value(x)).abs());
                }
            }
        }
    }
    assert!(worst <= ZERO_TOL, "unit absorption deviation {worst}");

    let alpha = WeightFunction::linear(3.0).unwrap();
    for seed in 0..5 {
        let line = generate_space(SpaceKind::Line, 10, 600 + seed).unwrap();
        let lip = AlgebraContext::new(&line, &alpha).unit().lip_norm();
        assert!((lip - 3.0).abs() <= ZERO_TOL, "unit lip {lip} != 3");
    }
    pass(
        "criterion 06 unit",
        format!("zeta absorbs 100 random f (dev {worst:.2e}); lip(zeta) = 3 under 3t on lines"),
    );
}

#[test]
fn criterion_07_spectrum_at_finite_scale() {
    let mut checked = 0;
    for i in 0..50u64 {
        let mut rng = instance_rng(SEED, 7_000_000 + i);
        let kind = SpaceKind::ALL[(i as usize) % SpaceKind::ALL.len()];
        let mut n = rng.gen_range(1..=6);
        if kind == SpaceKind::IntegerLine {
            n = n.max(2) - 1;
        }
        let space = generate_space(kind, n, rng.gen()).unwrap();
        let (_, alpha) = &canonical_weights()[(i as usize) % 3];
        let ctx = AlgebraContext::new(&space, alpha);
        let chars = characters(&ctx).expect("character solve");
        assert_eq!(chars.len(), space.n() - 1, "character count on {space}");
        let f = random_function(&space, 2.0, &mut rng);
        for ch in &chars {
            let x = ch.point();
            let expected = f.value(x) / ctx.zeta(x);
            assert!((ch.apply(&f) - expected).abs() <= ZERO_TOL);
            let mu = lipfree_core::transform::mu(&space, alpha, x);
            assert!((ch.apply(&f) - mu.pair(&f)).abs() <= ZERO_TOL);
        }
        checked += chars.len();
    }
    pass(
        "criterion 07 spectrum at finite scale",
        format!("50 seeds (n <= 6): always n-1 characters, {checked} verified against normalized evaluations"),
    );
}

#[test]
fn criterion_08_ideals() {
    use lipfree_core::algebra::{hull, ideal_check, ideal_of};
    let mut subsets = 0;
    for (i, space) in spaces(12, 5, 8).iter().enumerate() {
        let (_, alpha) = &canonical_weights()[i % 3];
        let ctx = AlgebraContext::new(space, alpha);
        for mask in 0u32..(1 << (space.n() - 1)) {
            let mut k = vec![0usize];
            for x in 1..space.n() {
                if mask & (1 << (x - 1)) != 0 {
                    k.push(x);
                }
            }
            let basis = ideal_of(&ctx, &k).expect("vanishing ideal");
            assert_eq!(hull(space, &basis), k, "hull round trip on {space}");
            let check = ideal_check(&ctx, &basis).expect("verdicts agree");
            assert!(check.is_ideal && check.equals_hull_ideal);
            subsets += 1;
        }
    }
    let mut rejected = 0;
    let mut i = 0u64;
    while rejected < 50 {
        let mut rng = instance_rng(SEED, 8_500_000 + i);
        i += 1;
        let space = generate_space(SpaceKind::EuclideanCloud, 5, rng.gen()).unwrap();
        let ctx = AlgebraContext::new(&space, &WeightFunction::identity());
        let f = random_function(&space, 2.0, &mut rng);
        let span = Subspace::span(&space, std::slice::from_ref(&f));
        let zeros = lipfree_core::algebra::hull(&space, std::slice::from_ref(&f));
        if span.dim() == space.n() - zeros.len() {
            continue;
        }
        let check = ideal_check(&ctx, std::slice::from_ref(&f)).expect("verdicts agree");
        assert!(!check.is_ideal && !check.equals_hull_ideal);
        rejected += 1;
    }
    pass(
        "criterion 08 ideals",
        format!("{subsets} vanishing sets accepted with exact hull round trip; {rejected} non-hull subspaces rejected with agreeing verdicts"),
    );
}

#[test]
fn criterion_09_functor_laws() {
    let alpha = WeightFunction::identity();
    let mut worst_iso = 0.0f64;
    for i in 0..50u64 {
        let mut rng = instance_rng(SEED, 9_000_000 + i);
        let n = rng.gen_range(2..=10usize);
        let m_space = generate_space(
            SpaceKind::ALL[(i as usize) % SpaceKind::ALL.len() % 5],
            n,
            rng.gen(),
        )
        .unwrap();
        let n_pts = m_space.n();
        let bm = BoundedSpace::build(&m_space, &alpha).unwrap();

        // Identity law.
        let id = PointMap::identity(&m_space);
        assert_eq!(
            functor_map(&id, &bm, &bm).unwrap().indices(),
            id.indices(),
            "identity law"
        );

        // A random base-preserving bijection onto an isometric relabeling.
        let mut fwd: Vec<usize> = (1..n_pts).collect();
        fwd.shuffle(&mut rng);
        fwd.insert(0, 0);
        let inv = |v: usize| fwd.iter().position(|&p| p == v).unwrap();
        let matrix: Vec<Vec<f64>> = (0..n_pts)
            .map(|a| (0..n_pts).map(|b| m_space.dist(inv(a), inv(b))).collect())
            .collect();
        let n_space: SpaceRef = Arc::new(PointedMetricSpace::validate(&matrix, None).unwrap());
        let f = PointMap::new(&m_space, &n_space, fwd.clone()).unwrap();
        assert!(f.is_isometry());
        let bn = BoundedSpace::build(&n_space, &alpha).unwrap();
        let bf = functor_map(&f, &bm, &bn).unwrap();
        for x in 0..n_pts {
            for y in (x + 1)..n_pts {
                let dev = (bm.dist(x, y) - bn.space().dist(bf.apply(x), bf.apply(y))).abs();
                worst_iso = worst_iso.max(dev);
                assert!(dev <= EQ_TOL, "isometry deviation {dev}");
            }
        }

        // Composition law: another bijection into the original space.
        let mut g_map: Vec<usize> = (1..n_pts).collect();
        g_map.shuffle(&mut rng);
        g_map.insert(0, 0);
        let p_space = generate_space(SpaceKind::RandomMetric, n_pts, rng.gen()).unwrap();
        let g = PointMap::new(&p_space, &m_space, g_map).unwrap();
        let bp = BoundedSpace::build(&p_space, &alpha).unwrap();
        let composed = f.compose(&g).unwrap();
        let lhs = functor_map(&composed, &bp, &bn).unwrap();
        let rhs = functor_map(&f, &bm, &bn)
            .unwrap()
            .compose(&functor_map(&g, &bp, &bm).unwrap())
            .unwrap();
        assert_eq!(lhs.indices(), rhs.indices(), "composition law");
    }
    pass(
        "criterion 09 functor laws",
        format!(
            "50 bijections: identity and composition exact; isometry deviation <= {worst_iso:.2e}"
        ),
    );
}

#[test]
fn criterion_10_worked_isometries() {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let mut rng = instance_rng(SEED, 10_000_000 + i);
        let n = rng.gen_range(1..=20usize);
        let space = generate_space(SpaceKind::IntegerLine, n, rng.gen()).unwrap();
        let gamma = random_free_vector(&space, &mut rng);
        let (flow, l1) = l1_isometry_values(&gamma).unwrap();
        assert!((flow - l1).abs() <= EQ_TOL, "cumulative image gap on n={n}");
        worst = worst.max((flow - l1).abs());

        let m = rng.gen_range(2..=20usize);
        let line = generate_space(SpaceKind::Line, m, rng.gen()).unwrap();
        let coords: Vec<f64> = (0..line.n()).map(|x| line.base_dist(x)).collect();
        let gamma = random_free_vector(&line, &mut rng);
        let (flow, l1) = line_isometry_values(&coords, &gamma).unwrap();
        assert!((flow - l1).abs() <= EQ_TOL, "step image gap on m={m}");
        worst = worst.max((flow - l1).abs());
    }
    pass(
        "criterion 10 worked isometries",
        format!("100 vectors each on integer lines and real lines: worst gap {worst:.2e}"),
    );
}

#[test]
fn criterion_11_witness_functions() {
    let mut worst_lip = 0.0f64;
    let mut worst_slack = f64::INFINITY;
    for (i, space) in spaces(50, 12, 11).iter().enumerate() {
        let (_, alpha) = &canonical_weights()[i % 3];
        let report = check_witnesses(space, alpha, EQ_TOL).expect("witness separation");
        assert!(
            report.max_f_lip <= 1.0 + ZERO_TOL,
            "witness lip {}",
            report.max_f_lip
        );
        worst_lip = worst_lip.max(report.max_f_lip);
        worst_slack = worst_slack.min(report.min_slack);
    }
    pass(
        "criterion 11 witness functions",
        format!("50 spaces, every y: lip <= 1+1e-12 (max {worst_lip:.12}), separation slack >= {worst_slack:.2e}"),
    );
}

#[test]
fn criterion_12_deterministic_reports() {
    // Library level: identical configurations give byte-identical reports
    // and a clean pass. The binary-level rerun lives in the cli test.
    let config = ExperimentConfig::new(SuiteKind::All, SEED);
    let first = run_suite(&config).expect("suite run");
    let second = run_suite(&config).expect("suite run");
    assert!(first.passed(), "all-suite report must pass");
    assert_eq!(
        first.to_json(),
        second.to_json(),
        "reports must be byte-identical"
    );
    pass(
        "criterion 12 deterministic reports",
        format!(
            "all-suite at seed {SEED}: {} records, byte-identical JSON across runs",
            first.records.len()
        ),
    );
}
