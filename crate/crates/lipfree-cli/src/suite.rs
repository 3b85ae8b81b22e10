//! Suite drivers: each suite generates seeded instances, runs the relevant
//! checkers, and emits one record per checked statement.
//!
//! Instances are derived from the run seed by a fixed per-suite stream
//! offset, computed independently, and reduced in instance order, so reports
//! are byte-identical across runs and thread counts. `LIPFREE_THREADS` caps
//! the worker pool.

use std::sync::Arc;
use std::time::Instant;

use lipfree_core::algebra::{
    characters, check_submultiplicativity, check_support_transfer, hull, ideal_check, ideal_of,
    AlgebraContext, Subspace,
};
use lipfree_core::free::{dual_norm, free_norm, l1_isometry_values, line_isometry_values};
use lipfree_core::generate::{
    generate_space, instance_rng, random_free_vector, random_function, random_sparse_vector,
    SpaceKind,
};
use lipfree_core::metric::{LipschitzFunction, PointedMetricSpace, SpaceRef};
use lipfree_core::transform::{check_witnesses, functor_map, PointMap};
use lipfree_core::{BoundedSpace, WeightFunction};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, SuiteKind};
use crate::report::{CheckRecord, Report};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("suite failed: {0}")]
    Internal(String),
}

impl SuiteError {
    fn internal(e: impl std::fmt::Display) -> Self {
        SuiteError::Internal(e.to_string())
    }
}

/// Space families used for generic instances; degenerate integer lines are
/// exercised by the duality and examples suites.
const CONTINUOUS_KINDS: [SpaceKind; 5] = [
    SpaceKind::EuclideanCloud,
    SpaceKind::RandomMetric,
    SpaceKind::Line,
    SpaceKind::SphereShell,
    SpaceKind::PathGraph,
];

fn stream_offset(suite: SuiteKind) -> u64 {
    SuiteKind::SINGLE
        .iter()
        .position(|s| *s == suite)
        .unwrap_or(usize::MAX) as u64
        * 1_000_000
}

/// Runs the configured suite (or all of them) and assembles the report.
pub fn run_suite(config: &ExperimentConfig) -> Result<Report, SuiteError> {
    config.validate()?;
    let started = Instant::now();
    let pool = build_pool()?;
    let suites: Vec<SuiteKind> = match config.suite {
        SuiteKind::All => SuiteKind::SINGLE.to_vec(),
        single => vec![single],
    };
    let mut records = Vec::new();
    for suite in suites {
        records.extend(run_single(suite, config, &pool)?);
    }
    let mut report = Report::new(config.suite.name().to_string(), config.seed, records);
    report.runtime_secs = started.elapsed().as_secs_f64();
    Ok(report)
}

fn run_single(
    suite: SuiteKind,
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    match suite {
        SuiteKind::Duality => duality_suite(config, pool),
        SuiteKind::Compbis => compbis_suite(config, pool),
        SuiteKind::TheoremA => theorem_a_suite(config, pool),
        SuiteKind::Algebra => algebra_suite(config, pool),
        SuiteKind::Spectrum => spectrum_suite(config, pool),
        SuiteKind::Ideals => ideals_suite(config, pool),
        SuiteKind::Functor => functor_suite(config, pool),
        SuiteKind::Examples => examples_suite(config, pool),
        SuiteKind::All => unreachable!("expanded by run_suite"),
    }
}

fn build_pool() -> Result<rayon::ThreadPool, SuiteError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = std::env::var("LIPFREE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
    {
        builder = builder.num_threads(threads);
    }
    builder.build().map_err(SuiteError::internal)
}

fn par_instances<F>(
    pool: &rayon::ThreadPool,
    count: usize,
    f: F,
) -> Result<Vec<CheckRecord>, SuiteError>
where
    F: Fn(usize) -> Result<Vec<CheckRecord>, SuiteError> + Sync + Send,
{
    let nested: Result<Vec<Vec<CheckRecord>>, SuiteError> =
        pool.install(|| (0..count).into_par_iter().map(f).collect());
    Ok(nested?.into_iter().flatten().collect())
}

/// The weights a suite exercises: the override when given, otherwise the
/// canonical three.
fn suite_weights(config: &ExperimentConfig) -> Result<Vec<(String, WeightFunction)>, SuiteError> {
    match &config.alpha {
        Some(spec) => Ok(vec![(spec.to_string(), spec.resolve()?)]),
        None => Ok(vec![
            ("identity".to_string(), WeightFunction::identity()),
            ("shifted".to_string(), WeightFunction::shifted()),
            (
                "linear:3".to_string(),
                WeightFunction::linear(3.0).expect("canonical weight"),
            ),
        ]),
    }
}

struct Instance {
    space: SpaceRef,
    label: String,
    rng: rand_chacha::ChaCha8Rng,
}

/// Deterministically derives the instance space and generator for stream
/// `offset + index`.
fn make_instance(
    config: &ExperimentConfig,
    suite: SuiteKind,
    index: usize,
    kinds: &[SpaceKind],
    max_size: usize,
) -> Result<Instance, SuiteError> {
    let stream = stream_offset(suite) + index as u64;
    let mut rng = instance_rng(config.seed, stream);
    let kind = kinds[index % kinds.len()];
    let mut n = rng.gen_range(2..=max_size.max(2));
    if kind == SpaceKind::IntegerLine {
        // The integer line on {0, ..., n} has n + 1 points.
        n -= 1;
    }
    let sub_seed: u64 = rng.gen();
    let space = generate_space(kind, n, sub_seed).map_err(SuiteError::internal)?;
    let label = format!("{}(n={}) #{stream}", kind.name(), space.n());
    Ok(Instance { space, label, rng })
}

// --- duality ---------------------------------------------------------------

fn duality_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Duality.name();
    let trials = config.trials.unwrap_or(200);
    let max_size = config.size.unwrap_or(40);
    par_instances(pool, trials, |i| {
        let mut inst = make_instance(config, SuiteKind::Duality, i, &SpaceKind::ALL, max_size)?;
        let gamma = random_free_vector(&inst.space, &mut inst.rng);
        let primal = free_norm(&gamma);
        let mut records = Vec::new();
        match dual_norm(&gamma) {
            Ok((dual, witness)) => {
                records.push(CheckRecord::at_most(
                    suite,
                    "duality.gap",
                    inst.label.clone(),
                    config.tol,
                    (primal - dual).abs(),
                ));
                records.push(CheckRecord::at_most(
                    suite,
                    "duality.witness_lip",
                    inst.label.clone(),
                    1.0 + config.tol,
                    witness.lip_norm(),
                ));
            }
            Err(e) => {
                records.push(CheckRecord::at_most(
                    suite,
                    "duality.solver",
                    format!("{} ({e})", inst.label),
                    0.0,
                    1.0,
                ));
            }
        }
        Ok(records)
    })
}

// --- compbis: sandwich, norm window, witnesses, annuli ----------------------

fn compbis_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Compbis.name();
    let trials = config.trials.unwrap_or(100);
    let max_size = config.size.unwrap_or(30);
    let weights = suite_weights(config)?;
    par_instances(pool, trials, |i| {
        let inst = make_instance(config, SuiteKind::Compbis, i, &CONTINUOUS_KINDS, max_size)?;
        let space = &inst.space;
        let mut records = Vec::new();
        for (alpha_name, alpha) in &weights {
            let label = format!("{} alpha={alpha_name}", inst.label);
            let b = BoundedSpace::build(space, alpha).map_err(SuiteError::internal)?;
            let k = alpha.kconst();

            let mut lower_ratio = 0.0f64;
            let mut upper_ratio = 0.0f64;
            for x in 0..space.n() {
                for y in (x + 1)..space.n() {
                    let da = b.d_alpha(x, y);
                    let db = b.dist(x, y);
                    lower_ratio = lower_ratio.max(da / db);
                    upper_ratio = upper_ratio.max(db / ((1.0 + k) * da));
                }
            }
            records.push(CheckRecord::at_most(
                suite,
                "sandwich.lower",
                label.clone(),
                1.0 + config.tol,
                lower_ratio,
            ));
            records.push(CheckRecord::at_most(
                suite,
                "sandwich.upper",
                label.clone(),
                1.0 + config.tol,
                upper_ratio,
            ));

            let floor = {
                let d = space.min_base_dist().expect("two points at least");
                let base = (1.0 / alpha.lip()).min(d / alpha.eval(d));
                if alpha.alpha0() == 0.0 {
                    base.max(1.0 / alpha.lip())
                } else {
                    base
                }
            };
            let mut norm_upper = 0.0f64;
            let mut norm_lower = 0.0f64;
            for x in 1..space.n() {
                let norm = b.dist(0, x);
                norm_upper = norm_upper.max(norm / alpha.dconst());
                norm_lower = norm_lower.max(floor / norm);
            }
            records.push(CheckRecord::at_most(
                suite,
                "mu_norm.upper",
                label.clone(),
                1.0 + config.tol,
                norm_upper,
            ));
            records.push(CheckRecord::at_most(
                suite,
                "mu_norm.lower",
                label.clone(),
                1.0 + config.tol,
                norm_lower,
            ));

            match check_witnesses(space, alpha, config.tol) {
                Ok(w) => {
                    records.push(CheckRecord::at_most(
                        suite,
                        "witness.lip",
                        label.clone(),
                        1.0 + config.zero_tol,
                        w.max_f_lip,
                    ));
                    records.push(CheckRecord::at_most(
                        suite,
                        "witness.separation",
                        label.clone(),
                        config.tol,
                        -w.min_slack,
                    ));
                }
                Err(e) => records.push(CheckRecord::at_most(
                    suite,
                    "witness.separation",
                    format!("{label} ({e})"),
                    0.0,
                    1.0,
                )),
            }

            let radii: Vec<f64> = (1..space.n()).map(|x| space.base_dist(x)).collect();
            let r = radii.iter().cloned().fold(f64::INFINITY, f64::min);
            let big_r = radii.iter().cloned().fold(0.0f64, f64::max);
            let distortion = lipfree_core::transform::annulus_distortion(&b, r, big_r)
                .map_err(SuiteError::internal)?;
            let zmax = (1..space.n()).map(|x| b.zeta(x)).fold(0.0f64, f64::max);
            let zmin = (1..space.n())
                .map(|x| b.zeta(x))
                .fold(f64::INFINITY, f64::min);
            let cap = (1.0 + k) * zmax / zmin;
            records.push(CheckRecord::at_most(
                suite,
                "annulus.distortion",
                label,
                1.0 + config.tol,
                distortion / cap,
            ));
        }
        Ok(records)
    })
}

// --- theorem_a: the free-space isomorphism constants ------------------------

fn theorem_a_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::TheoremA.name();
    let trials = config.trials.unwrap_or(100);
    let max_size = config.size.unwrap_or(30);
    let weights = suite_weights(config)?;
    par_instances(pool, trials, |i| {
        let inst = make_instance(config, SuiteKind::TheoremA, i, &CONTINUOUS_KINDS, max_size)?;
        let space = &inst.space;
        let mut records = Vec::new();
        for (alpha_name, alpha) in &weights {
            let label = format!("{} alpha={alpha_name}", inst.label);
            let b = BoundedSpace::build(space, alpha).map_err(SuiteError::internal)?;
            let p = b.p_free();
            let q = b.q_free();
            let round_trip = q.compose(&p).map_err(SuiteError::internal)?;
            let mut deviation = 0.0f64;
            for x in 1..space.n() {
                for (t, &c) in round_trip.column(x).coeffs().iter().enumerate() {
                    let expected = if t == x { 1.0 } else { 0.0 };
                    deviation = deviation.max((c - expected).abs());
                }
            }
            records.push(CheckRecord::at_most(
                suite,
                "iso.round_trip",
                label.clone(),
                0.0,
                deviation,
            ));
            let q_norm = q.operator_norm();
            let p_norm = p.operator_norm();
            records.push(CheckRecord::at_most(
                suite,
                "iso.q_norm",
                label.clone(),
                1.0 + config.tol,
                q_norm,
            ));
            records.push(CheckRecord::at_most(
                suite,
                "iso.product",
                label,
                1.0 + 2.0 * alpha.kconst() + config.tol,
                p_norm * q_norm,
            ));
        }
        Ok(records)
    })
}

// --- algebra: submultiplicativity, sharpness, dual isomorphism, unit --------

fn algebra_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Algebra.name();
    let pair_trials = config.trials.unwrap_or(1000);
    let max_size = config.size.unwrap_or(20);
    let bound_weights: Vec<(String, WeightFunction)> = match &config.alpha {
        Some(spec) => vec![(spec.to_string(), spec.resolve()?)],
        None => vec![
            (
                "linear:3".to_string(),
                WeightFunction::linear(3.0).expect("canonical weight"),
            ),
            ("identity".to_string(), WeightFunction::identity()),
        ],
    };

    // Submultiplicativity over random pairs, spread over several spaces.
    let spaces = 10usize;
    let per_space = pair_trials.div_ceil(spaces);
    let mut records = par_instances(pool, spaces, |i| {
        let mut inst = make_instance(config, SuiteKind::Algebra, i, &CONTINUOUS_KINDS, max_size)?;
        let mut out = Vec::new();
        for (alpha_name, alpha) in &bound_weights {
            let ctx = AlgebraContext::new(&inst.space, alpha);
            let label = format!("{} alpha={alpha_name} pairs={per_space}", inst.label);
            match check_submultiplicativity(&ctx, per_space, &mut inst.rng, config.tol) {
                Ok(r) => out.push(CheckRecord::at_most(
                    suite,
                    "product.bound",
                    label,
                    r.bound + config.tol,
                    r.max_ratio,
                )),
                Err(e) => out.push(CheckRecord::at_most(
                    suite,
                    "product.bound",
                    format!("{label} ({e})"),
                    0.0,
                    1.0,
                )),
            }
        }
        Ok(out)
    })?;

    // Sharpness of the constant for the weight 3t: the quadruple
    // {0, 1, 1+eps, 2} with the tent function drives the ratio near 1.
    if config.alpha.is_none() {
        let eps = 1e-3;
        let space: SpaceRef = Arc::new(
            PointedMetricSpace::from_line_points(&[0.0, 1.0, 1.0 + eps, 2.0])
                .map_err(SuiteError::internal)?,
        );
        let ctx = AlgebraContext::new(&space, &WeightFunction::linear(3.0).expect("weight"));
        let f = LipschitzFunction::from_fn(&space, |x| 1.0 - (space.base_dist(x) - 1.0).abs());
        let g = f.scale(-1.0);
        let ratio = ctx.odot(&f, &g).lip_norm() / (f.lip_norm() * g.lip_norm());
        records.push(CheckRecord::at_least(
            suite,
            "product.sharpness",
            format!("tent pair on {{0, 1, 1+{eps}, 2}} alpha=linear:3"),
            0.99,
            ratio,
        ));
        // The unit has Lipschitz norm exactly 3 on line spaces under 3t.
        let line =
            generate_space(SpaceKind::Line, 8, config.seed ^ 0x11).map_err(SuiteError::internal)?;
        let unit_lip = AlgebraContext::new(&line, &WeightFunction::linear(3.0).expect("weight"))
            .unit()
            .lip_norm();
        records.push(CheckRecord::at_most(
            suite,
            "unit.lip",
            "line(n=8) alpha=linear:3".to_string(),
            config.zero_tol,
            (unit_lip - 3.0).abs(),
        ));
    }

    // Pointwise identities: the dual maps invert each other and turn the
    // weighted product into the plain one; the unit absorbs; the shifted
    // lattice join transports.
    let iso_trials = 100usize;
    let weights = suite_weights(config)?;
    let iso_records = par_instances(pool, iso_trials, |i| {
        let mut inst = make_instance(
            config,
            SuiteKind::Algebra,
            1000 + i,
            &CONTINUOUS_KINDS,
            max_size.min(12),
        )?;
        let space = &inst.space;
        let (alpha_name, alpha) = &weights[i % weights.len()];
        let label = format!("{} alpha={alpha_name}", inst.label);
        let ctx = AlgebraContext::new(space, alpha);
        let b = BoundedSpace::build(space, alpha).map_err(SuiteError::internal)?;
        let f = random_function(space, 2.0, &mut inst.rng);
        let g = random_function(space, 2.0, &mut inst.rng);

        let q_f = ctx.q_dual(&b, &f);
        let q_g = ctx.q_dual(&b, &g);
        let q_fg = ctx.q_dual(&b, &ctx.odot(&f, &g));
        let mut mult_dev = 0.0f64;
        let mut round_dev = 0.0f64;
        let mut unit_dev = 0.0f64;
        let mut lattice_dev = 0.0f64;
        let back = ctx.p_dual(&b, &q_f);
        let absorbed = ctx.odot(&ctx.unit(), &f);
        let c = inst.rng.gen_range(0.0..2.0);
        let direct = ctx
            .lattice_join_shifted(&f, &g, c)
            .map_err(SuiteError::internal)?;
        let shifted_const = LipschitzFunction::from_fn(b.space(), |x| if x == 0 { 0.0 } else { c });
        let transported = ctx.p_dual(&b, &q_f.join(&q_g.sub(&shifted_const)));
        for x in 0..space.n() {
            mult_dev = mult_dev.max((q_fg.value(x) - q_f.value(x) * q_g.value(x)).abs());
            round_dev = round_dev.max((back.value(x) - f.value(x)).abs());
            unit_dev = unit_dev.max((absorbed.value(x) - f.value(x)).abs());
            lattice_dev = lattice_dev.max((direct.value(x) - transported.value(x)).abs());
        }
        Ok(vec![
            CheckRecord::at_most(
                suite,
                "dual_iso.multiplicative",
                label.clone(),
                config.zero_tol,
                mult_dev,
            ),
            CheckRecord::at_most(
                suite,
                "dual_iso.round_trip",
                label.clone(),
                config.zero_tol,
                round_dev,
            ),
            CheckRecord::at_most(
                suite,
                "unit.absorbs",
                label.clone(),
                config.zero_tol,
                unit_dev,
            ),
            CheckRecord::at_most(
                suite,
                "lattice.transport",
                label,
                config.zero_tol,
                lattice_dev,
            ),
        ])
    })?;
    records.extend(iso_records);
    Ok(records)
}

// --- spectrum ----------------------------------------------------------------

fn spectrum_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Spectrum.name();
    let trials = config.trials.unwrap_or(50);
    let max_size = config.size.unwrap_or(6);
    let weights = suite_weights(config)?;
    par_instances(pool, trials, |i| {
        let stream = stream_offset(SuiteKind::Spectrum) + i as u64;
        let mut rng = instance_rng(config.seed, stream);
        let kind = CONTINUOUS_KINDS[i % CONTINUOUS_KINDS.len()];
        let n = rng.gen_range(1..=max_size.max(1));
        let sub_seed: u64 = rng.gen();
        let space = generate_space(kind, n, sub_seed).map_err(SuiteError::internal)?;
        let (alpha_name, alpha) = &weights[i % weights.len()];
        let label = format!(
            "{}(n={}) #{stream} alpha={alpha_name}",
            kind.name(),
            space.n()
        );
        let ctx = AlgebraContext::new(&space, alpha);
        let mut records = Vec::new();
        match characters(&ctx) {
            Ok(chars) => {
                records.push(CheckRecord::at_most(
                    suite,
                    "spectrum.count",
                    label.clone(),
                    0.0,
                    (chars.len() as f64 - (space.n() - 1) as f64).abs(),
                ));
                let f = random_function(&space, 2.0, &mut rng);
                let mut dev = 0.0f64;
                for ch in &chars {
                    let x = ch.point();
                    dev = dev.max((ch.apply(&f) - f.value(x) / ctx.zeta(x)).abs());
                    let mu = lipfree_core::transform::mu(&space, alpha, x);
                    dev = dev.max((ch.apply(&f) - mu.pair(&f)).abs());
                }
                records.push(CheckRecord::at_most(
                    suite,
                    "spectrum.values",
                    label,
                    config.zero_tol,
                    dev,
                ));
            }
            Err(e) => records.push(CheckRecord::at_most(
                suite,
                "spectrum.count",
                format!("{label} ({e})"),
                0.0,
                1.0,
            )),
        }
        Ok(records)
    })
}

// --- ideals -------------------------------------------------------------------

fn ideals_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Ideals.name();
    let trials = config.trials.unwrap_or(20);
    let max_size = config.size.unwrap_or(5);
    let weights = suite_weights(config)?;

    // Exhaustive: every vanishing set on every instance.
    let mut records = par_instances(pool, trials, |i| {
        let stream = stream_offset(SuiteKind::Ideals) + i as u64;
        let mut rng = instance_rng(config.seed, stream);
        let kind = CONTINUOUS_KINDS[i % CONTINUOUS_KINDS.len()];
        let n = rng.gen_range(2..=max_size.max(2));
        let sub_seed: u64 = rng.gen();
        let space = generate_space(kind, n, sub_seed).map_err(SuiteError::internal)?;
        let (alpha_name, alpha) = &weights[i % weights.len()];
        let ctx = AlgebraContext::new(&space, alpha);
        let label = format!(
            "{}(n={}) #{stream} alpha={alpha_name}",
            kind.name(),
            space.n()
        );
        let mut failures = 0usize;
        let mut subsets = 0usize;
        for mask in 0u32..(1 << (space.n() - 1)) {
            let mut zero_set = vec![0usize];
            for x in 1..space.n() {
                if mask & (1 << (x - 1)) != 0 {
                    zero_set.push(x);
                }
            }
            subsets += 1;
            let basis = ideal_of(&ctx, &zero_set).map_err(SuiteError::internal)?;
            let restored = hull(&space, &basis) == zero_set;
            let verdict = ideal_check(&ctx, &basis);
            let ok = restored
                && matches!(&verdict, Ok(check) if check.is_ideal && check.equals_hull_ideal);
            if !ok {
                failures += 1;
            }
        }
        Ok(vec![CheckRecord::at_most(
            suite,
            "ideal.accept",
            format!("{label} subsets={subsets}"),
            0.0,
            failures as f64,
        )])
    })?;

    // Random non-hull subspaces must fail, with both verdicts agreeing.
    let reject_trials = 50usize;
    let reject_records = par_instances(pool, reject_trials, |i| {
        let stream = stream_offset(SuiteKind::Ideals) + 10_000 + i as u64;
        let mut rng = instance_rng(config.seed, stream);
        let sub_seed: u64 = rng.gen();
        let space =
            generate_space(SpaceKind::EuclideanCloud, 5, sub_seed).map_err(SuiteError::internal)?;
        let (alpha_name, alpha) = &weights[i % weights.len()];
        let ctx = AlgebraContext::new(&space, alpha);
        let label = format!("euclidean_cloud(n=5) #{stream} alpha={alpha_name}");
        // A dense 1-dimensional span: its hull is the base alone, so it can
        // only be the full vanishing ideal, which it is not.
        let f = random_function(&space, 2.0, &mut rng);
        let span = Subspace::span(&space, std::slice::from_ref(&f));
        let zeros = hull(&space, std::slice::from_ref(&f));
        if span.dim() == space.n() - zeros.len() {
            // Vanishingly rare draw that is a genuine ideal; nothing to
            // reject.
            return Ok(Vec::new());
        }
        let record = match ideal_check(&ctx, std::slice::from_ref(&f)) {
            Ok(check) => CheckRecord::at_most(
                suite,
                "ideal.reject",
                label,
                0.0,
                if check.is_ideal || check.equals_hull_ideal {
                    1.0
                } else {
                    0.0
                },
            ),
            Err(e) => CheckRecord::at_most(
                suite,
                "ideal.verdicts_agree",
                format!("{label} ({e})"),
                0.0,
                1.0,
            ),
        };
        Ok(vec![record])
    })?;
    records.extend(reject_records);
    Ok(records)
}

// --- functor -------------------------------------------------------------------

fn functor_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Functor.name();
    let trials = config.trials.unwrap_or(50);
    let max_size = config.size.unwrap_or(12);
    par_instances(pool, trials, |i| {
        let mut inst = make_instance(config, SuiteKind::Functor, i, &CONTINUOUS_KINDS, max_size)?;
        let m_space = &inst.space;
        let n = m_space.n();
        let alpha = WeightFunction::identity();
        let bm = BoundedSpace::build(m_space, &alpha).map_err(SuiteError::internal)?;
        let mut records = Vec::new();

        // Identity law.
        let id = PointMap::identity(m_space);
        let induced = functor_map(&id, &bm, &bm).map_err(SuiteError::internal)?;
        records.push(CheckRecord::at_most(
            suite,
            "functor.identity",
            inst.label.clone(),
            0.0,
            if induced.indices() == id.indices() {
                0.0
            } else {
                1.0
            },
        ));

        // An isometric relabeling of the space.
        let mut perm: Vec<usize> = (1..n).collect();
        perm.shuffle(&mut inst.rng);
        let mut fwd = vec![0usize];
        fwd.extend(perm);
        let matrix: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| m_space.dist(inv_of(&fwd, i), inv_of(&fwd, j)))
                    .collect()
            })
            .collect();
        let n_space: SpaceRef =
            Arc::new(PointedMetricSpace::validate(&matrix, None).map_err(SuiteError::internal)?);
        let iso = PointMap::new(m_space, &n_space, fwd.clone()).map_err(SuiteError::internal)?;
        let bn = BoundedSpace::build(&n_space, &alpha).map_err(SuiteError::internal)?;
        let induced_iso = functor_map(&iso, &bm, &bn).map_err(SuiteError::internal)?;
        let mut iso_dev = 0.0f64;
        for x in 0..n {
            for y in (x + 1)..n {
                let before = bm.dist(x, y);
                let after = bn.space().dist(induced_iso.apply(x), induced_iso.apply(y));
                iso_dev = iso_dev.max((before - after).abs());
            }
        }
        records.push(CheckRecord::at_most(
            suite,
            "functor.isometry",
            format!("{} alpha=identity", inst.label),
            config.tol,
            iso_dev,
        ));

        // Composition law: indices compose exactly through the transform.
        let back = PointMap::new(&n_space, m_space, (0..n).map(|i| inv_of(&fwd, i)).collect())
            .map_err(SuiteError::internal)?;
        let composed = back.compose(&iso).map_err(SuiteError::internal)?;
        let lhs = functor_map(&composed, &bm, &bm).map_err(SuiteError::internal)?;
        let rhs_outer = functor_map(&back, &bn, &bm).map_err(SuiteError::internal)?;
        let rhs_inner = functor_map(&iso, &bm, &bn).map_err(SuiteError::internal)?;
        let rhs = rhs_outer
            .compose(&rhs_inner)
            .map_err(SuiteError::internal)?;
        records.push(CheckRecord::at_most(
            suite,
            "functor.compose",
            inst.label.clone(),
            0.0,
            if lhs.indices() == rhs.indices() {
                0.0
            } else {
                1.0
            },
        ));

        // A generic bi-Lipschitz bijection onto an unrelated space, bounded
        // for the canonical weights.
        let other = generate_space(SpaceKind::RandomMetric, n, inst.rng.gen())
            .map_err(SuiteError::internal)?;
        let generic =
            PointMap::new(m_space, &other, (0..n).collect()).map_err(SuiteError::internal)?;
        for (alpha_name, alpha) in [
            ("identity", WeightFunction::identity()),
            ("shifted", WeightFunction::shifted()),
        ] {
            let bsrc = BoundedSpace::build(m_space, &alpha).map_err(SuiteError::internal)?;
            let bdst = BoundedSpace::build(&other, &alpha).map_err(SuiteError::internal)?;
            let report =
                lipfree_core::transform::check_functor_bound(&generic, &bsrc, &bdst, config.tol);
            let record = match report {
                Ok(r) => CheckRecord::at_most(
                    suite,
                    "functor.lip_bound",
                    format!("{} alpha={alpha_name}", inst.label),
                    1.0 + config.tol,
                    r.measured / r.bound.expect("canonical weights carry a bound"),
                ),
                Err(e) => CheckRecord::at_most(
                    suite,
                    "functor.lip_bound",
                    format!("{} alpha={alpha_name} ({e})", inst.label),
                    0.0,
                    1.0,
                ),
            };
            records.push(record);
        }

        // Support transfer through the basis map.
        let gamma = random_sparse_vector(m_space, &mut inst.rng);
        records.push(CheckRecord::at_most(
            suite,
            "support.transfer",
            inst.label.clone(),
            0.0,
            if check_support_transfer(&bm, &gamma).is_ok() {
                0.0
            } else {
                1.0
            },
        ));
        Ok(records)
    })
}

fn inv_of(perm: &[usize], value: usize) -> usize {
    perm.iter().position(|&p| p == value).expect("permutation")
}

// --- examples -------------------------------------------------------------------

fn examples_suite(
    config: &ExperimentConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<CheckRecord>, SuiteError> {
    let suite = SuiteKind::Examples.name();
    let trials = config.trials.unwrap_or(100);
    let max_size = config.size.unwrap_or(20);
    par_instances(pool, trials, |i| {
        let stream = stream_offset(SuiteKind::Examples) + i as u64;
        let mut rng = instance_rng(config.seed, stream);
        let sub_seed: u64 = rng.gen();
        let record = if i % 2 == 0 {
            let n = rng.gen_range(1..=max_size.max(1));
            let space = generate_space(SpaceKind::IntegerLine, n, sub_seed)
                .map_err(SuiteError::internal)?;
            let gamma = random_free_vector(&space, &mut rng);
            let (flow, l1) = l1_isometry_values(&gamma).map_err(SuiteError::internal)?;
            CheckRecord::at_most(
                suite,
                "examples.l1_gap",
                format!("integer_line(n={}) #{stream}", space.n()),
                config.tol,
                (flow - l1).abs(),
            )
        } else {
            let n = rng.gen_range(2..=max_size.max(2));
            let space =
                generate_space(SpaceKind::Line, n, sub_seed).map_err(SuiteError::internal)?;
            let coords: Vec<f64> = (0..space.n()).map(|x| space.base_dist(x)).collect();
            let gamma = random_free_vector(&space, &mut rng);
            let (flow, l1) = line_isometry_values(&coords, &gamma).map_err(SuiteError::internal)?;
            CheckRecord::at_most(
                suite,
                "examples.line_gap",
                format!("line(n={}) #{stream}", space.n()),
                config.tol,
                (flow - l1).abs(),
            )
        };
        Ok(vec![record])
    })
}
