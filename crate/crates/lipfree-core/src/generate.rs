//! Deterministic space and data generators for tests and verification runs.
//!
//! Every generator is a pure function of its seed, so runs are reproducible
//! record for record.

use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::free::FreeVector;
use crate::metric::{LipschitzFunction, PointedMetricSpace, SpaceRef};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("size must be at least 1, got {0}")]
    BadSize(usize),
    #[error("unknown space kind {0:?}")]
    UnknownKind(String),
}

/// Families of generated spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// 0 together with sorted positive reals on the half-line.
    Line,
    /// The integer points {0, 1, ..., size}.
    IntegerLine,
    /// Uniform points in a cube, the first being the base point.
    EuclideanCloud,
    /// The base point plus points on the unit sphere around it.
    SphereShell,
    /// A chain with random edge lengths (a line metric in disguise).
    PathGraph,
    /// Shortest-path completion of a random symmetric weight matrix.
    RandomMetric,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::Line,
        SpaceKind::IntegerLine,
        SpaceKind::EuclideanCloud,
        SpaceKind::SphereShell,
        SpaceKind::PathGraph,
        SpaceKind::RandomMetric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Line => "line",
            SpaceKind::IntegerLine => "integer_line",
            SpaceKind::EuclideanCloud => "euclidean_cloud",
            SpaceKind::SphereShell => "sphere_shell",
            SpaceKind::PathGraph => "path_graph",
            SpaceKind::RandomMetric => "random_metric",
        }
    }
}

impl FromStr for SpaceKind {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| GenerateError::UnknownKind(s.to_string()))
    }
}

/// Generates a validated space of the given kind. `size` is the number of
/// points, except for the integer line {0, ..., size} which has size + 1.
pub fn generate_space(kind: SpaceKind, size: usize, seed: u64) -> Result<SpaceRef, GenerateError> {
    if size == 0 {
        return Err(GenerateError::BadSize(size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = match kind {
        SpaceKind::Line => {
            let mut coords = vec![0.0];
            coords.extend((1..size).map(|_| rng.gen_range(0.25..50.0)));
            coords.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
            coords.dedup();
            PointedMetricSpace::from_line_points(&coords)
        }
        SpaceKind::IntegerLine => {
            let coords: Vec<f64> = (0..=size).map(|i| i as f64).collect();
            PointedMetricSpace::from_line_points(&coords)
        }
        SpaceKind::PathGraph => {
            let mut coords = vec![0.0];
            let mut at = 0.0;
            for _ in 1..size {
                at += rng.gen_range(0.5..2.0);
                coords.push(at);
            }
            PointedMetricSpace::from_line_points(&coords)
        }
        SpaceKind::EuclideanCloud => {
            let points: Vec<[f64; 3]> = (0..size)
                .map(|_| {
                    [
                        rng.gen_range(0.0..10.0),
                        rng.gen_range(0.0..10.0),
                        rng.gen_range(0.0..10.0),
                    ]
                })
                .collect();
            PointedMetricSpace::validate(&euclidean_matrix(&points), None)
        }
        SpaceKind::SphereShell => {
            let mut points = vec![[0.0, 0.0, 0.0]];
            points.extend((1..size).map(|_| {
                let v = [gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                [v[0] / norm, v[1] / norm, v[2] / norm]
            }));
            PointedMetricSpace::validate(&euclidean_matrix(&points), None)
        }
        SpaceKind::RandomMetric => {
            let mut w = vec![vec![0.0; size]; size];
            for i in 0..size {
                for j in (i + 1)..size {
                    let weight = rng.gen_range(1.0..10.0);
                    w[i][j] = weight;
                    w[j][i] = weight;
                }
            }
            // Shortest-path completion enforces the triangle inequality.
            for k in 0..size {
                for i in 0..size {
                    for j in 0..size {
                        let via = w[i][k] + w[k][j];
                        if i != j && via < w[i][j] {
                            w[i][j] = via;
                        }
                    }
                }
            }
            PointedMetricSpace::validate(&w, None)
        }
    };
    Ok(Arc::new(space.expect("generated space must validate")))
}

fn euclidean_matrix(points: &[[f64; 3]]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream simple.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// A dense random mass distribution with coefficients in [-2, 2].
pub fn random_free_vector(space: &SpaceRef, rng: &mut impl Rng) -> FreeVector {
    let coeff: Vec<f64> = (0..space.n())
        .map(|x| {
            if x == 0 {
                0.0
            } else {
                rng.gen_range(-2.0..2.0)
            }
        })
        .collect();
    FreeVector::from_coeff(space, coeff).expect("generated coefficients")
}

/// A sparse random mass distribution touching roughly half the points.
pub fn random_sparse_vector(space: &SpaceRef, rng: &mut impl Rng) -> FreeVector {
    let coeff: Vec<f64> = (0..space.n())
        .map(|x| {
            if x == 0 || rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(-2.0..2.0)
            }
        })
        .collect();
    FreeVector::from_coeff(space, coeff).expect("generated coefficients")
}

/// A random function vanishing at the base point, values in [-scale, scale].
pub fn random_function(space: &SpaceRef, scale: f64, rng: &mut impl Rng) -> LipschitzFunction {
    LipschitzFunction::from_fn(space, |_| rng.gen_range(-scale..scale))
}

/// A fresh deterministic generator for instance `index` of a seeded run.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
