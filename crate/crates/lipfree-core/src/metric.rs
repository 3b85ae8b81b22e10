//! Finite pointed metric spaces and scalar Lipschitz functions vanishing at
//! the base point.
//!
//! A space is a validated symmetric distance matrix; the point with index 0
//! is always the distinguished base point. Values are immutable after
//! construction, so spaces are shared behind [`SpaceRef`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for triangle-inequality validation. Generators produce
/// exact metrics; this only absorbs floating-point rounding in sums.
pub const TRIANGLE_REL_TOL: f64 = 1e-12;

/// Shared handle to an immutable space.
pub type SpaceRef = Arc<PointedMetricSpace>;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("distance matrix is empty")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("distance at ({i},{j}) is not a finite nonnegative number: {value}")]
    BadEntry { i: usize, j: usize, value: f64 },
    #[error("diagonal entry at point {i} is {value}, expected 0")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("matrix is not symmetric at ({i},{j}): {forward} vs {backward}")]
    NotSymmetric {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("points {i} and {j} are not separated: distance {value}")]
    NotSeparated { i: usize, j: usize, value: f64 },
    #[error(
        "triangle inequality violated: d({i},{k}) = {direct} exceeds \
         d({i},{j}) + d({j},{k}) = {via}"
    )]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },
    #[error("{labels} labels provided for {points} points")]
    LabelMismatch { labels: usize, points: usize },
    #[error("restriction selects no points")]
    EmptySelection,
    #[error("restriction must keep the base point (index 0)")]
    BaseNotKept,
    #[error("restriction index {index} out of range for {points} points")]
    IndexOutOfRange { index: usize, points: usize },
    #[error("{got} function values for a space with {expected} points")]
    ValueCountMismatch { got: usize, expected: usize },
    #[error("function value at the base point is {value}, expected 0")]
    NonzeroAtBase { value: f64 },
    #[error("function value at point {index} is not finite: {value}")]
    NonFiniteValue { index: usize, value: f64 },
    #[error("line points must start at 0 and be strictly increasing")]
    BadLinePoints,
}

/// A finite metric space with a distinguished base point at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedMetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl PointedMetricSpace {
    /// Validates a raw square matrix: symmetry, zero diagonal, separation of
    /// distinct points, and the triangle inequality (up to
    /// [`TRIANGLE_REL_TOL`] times the sum of the two sides).
    ///
    /// When a triangle violation is found, the reported triple is the one
    /// with the largest excess over the allowed slack.
    pub fn validate(matrix: &[Vec<f64>], labels: Option<Vec<String>>) -> Result<Self, MetricError> {
        let n = matrix.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(MetricError::LabelMismatch {
                    labels: l.len(),
                    points: n,
                });
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let v = matrix[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(MetricError::BadEntry { i, j, value: v });
                }
                dist[i * n + j] = v;
            }
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(MetricError::NonzeroDiagonal {
                    i,
                    value: dist[i * n + i],
                });
            }
            for j in (i + 1)..n {
                let fwd = dist[i * n + j];
                let bwd = dist[j * n + i];
                if fwd != bwd {
                    return Err(MetricError::NotSymmetric {
                        i,
                        j,
                        forward: fwd,
                        backward: bwd,
                    });
                }
                if fwd == 0.0 {
                    return Err(MetricError::NotSeparated { i, j, value: fwd });
                }
            }
        }
        // Scan all triples, remembering the worst excess.
        let mut worst: Option<(usize, usize, usize, f64, f64, f64)> = None;
        for i in 0..n {
            for k in (i + 1)..n {
                let direct = dist[i * n + k];
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    let via = dist[i * n + j] + dist[j * n + k];
                    let excess = direct - via - TRIANGLE_REL_TOL * via;
                    if excess > 0.0 && worst.is_none_or(|w| excess > w.5) {
                        worst = Some((i, j, k, direct, via, excess));
                    }
                }
            }
        }
        if let Some((i, j, k, direct, via, _)) = worst {
            return Err(MetricError::TriangleViolation {
                i,
                j,
                k,
                direct,
                via,
            });
        }
        Ok(Self { n, dist, labels })
    }

    /// Builds the induced metric of points on the real half-line. The first
    /// coordinate must be 0 (the base point) and coordinates must be strictly
    /// increasing, so distances |t_i - t_j| are exact.
    pub fn from_line_points(coords: &[f64]) -> Result<Self, MetricError> {
        if coords.is_empty() || coords[0] != 0.0 {
            return Err(MetricError::BadLinePoints);
        }
        let increasing = coords.windows(2).all(|w| w[1].is_finite() && w[0] < w[1]);
        if !increasing {
            return Err(MetricError::BadLinePoints);
        }
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = (coords[i] - coords[j]).abs();
            }
        }
        Ok(Self {
            n,
            dist,
            labels: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between points `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Distance from the base point to `x`.
    pub fn base_dist(&self, x: usize) -> f64 {
        self.dist[x]
    }

    /// Minimum distance from the base point to the other points; `None` for
    /// the single-point space.
    pub fn min_base_dist(&self) -> Option<f64> {
        (1..self.n)
            .map(|x| self.base_dist(x))
            .fold(None, |acc, d| Some(acc.map_or(d, |m: f64| m.min(d))))
    }

    pub fn diameter(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max(self.dist(i, j));
            }
        }
        m
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of a point: its label if present, else its index.
    pub fn point_name(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// Induced submetric on the selected points. `keep` must contain index 0;
    /// duplicates are ignored and the base point comes first in the result.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, MetricError> {
        if keep.is_empty() {
            return Err(MetricError::EmptySelection);
        }
        if let Some(&bad) = keep.iter().find(|&&i| i >= self.n) {
            return Err(MetricError::IndexOutOfRange {
                index: bad,
                points: self.n,
            });
        }
        if !keep.contains(&0) {
            return Err(MetricError::BaseNotKept);
        }
        let mut selected: Vec<usize> = keep.to_vec();
        selected.sort_unstable();
        selected.dedup();
        let m = selected.len();
        let mut dist = vec![0.0; m * m];
        for (a, &i) in selected.iter().enumerate() {
            for (b, &j) in selected.iter().enumerate() {
                dist[a * m + b] = self.dist(i, j);
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| selected.iter().map(|&i| l[i].clone()).collect());
        Ok(Self { n: m, dist, labels })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpaceFile::from(self)).expect("space serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, SpaceParseError> {
        let file: SpaceFile = serde_json::from_str(text)?;
        Ok(Self::validate(&file.dist, file.labels)?)
    }
}

#[derive(Debug, Error)]
pub enum SpaceParseError {
    #[error("malformed space file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// On-disk form of a space: `{"labels": [...], "dist": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct SpaceFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    dist: Vec<Vec<f64>>,
}

impl From<&PointedMetricSpace> for SpaceFile {
    fn from(space: &PointedMetricSpace) -> Self {
        let n = space.n;
        let dist = (0..n)
            .map(|i| (0..n).map(|j| space.dist(i, j)).collect())
            .collect();
        SpaceFile {
            labels: space.labels.clone(),
            dist,
        }
    }
}

impl fmt::Display for PointedMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "space({} points, diameter {:.6})",
            self.n,
            self.diameter()
        )
    }
}

/// A real function on the points of a space with f(0) = 0, an element of the
/// Lipschitz space over the base space.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzFunction {
    space: SpaceRef,
    values: Vec<f64>,
}

impl LipschitzFunction {
    pub fn new(space: &SpaceRef, values: Vec<f64>) -> Result<Self, MetricError> {
        if values.len() != space.n() {
            return Err(MetricError::ValueCountMismatch {
                got: values.len(),
                expected: space.n(),
            });
        }
        if values[0] != 0.0 {
            return Err(MetricError::NonzeroAtBase { value: values[0] });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(MetricError::NonFiniteValue { index, value });
        }
        Ok(Self {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn zero(space: &SpaceRef) -> Self {
        Self {
            space: Arc::clone(space),
            values: vec![0.0; space.n()],
        }
    }

    /// Builds f from per-point values, forcing the base value to 0.
    pub fn from_fn(space: &SpaceRef, f: impl FnMut(usize) -> f64) -> Self {
        let mut values: Vec<f64> = (0..space.n()).map(f).collect();
        values[0] = 0.0;
        Self {
            space: Arc::clone(space),
            values,
        }
    }

    /// The distance-to-base function d(0, .), always 1-Lipschitz.
    pub fn base_distance(space: &SpaceRef) -> Self {
        Self::from_fn(space, |x| space.base_dist(x))
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn value(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact Lipschitz norm: the maximum of |f(x)-f(y)| / d(x,y) over the
    /// n(n-1)/2 unordered pairs. The single-point space gives 0.
    pub fn lip_norm(&self) -> f64 {
        let n = self.space.n();
        let mut best = 0.0f64;
        for x in 0..n {
            for y in (x + 1)..n {
                let ratio = (self.values[x] - self.values[y]).abs() / self.space.dist(x, y);
                best = best.max(ratio);
            }
        }
        best
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self {
            space: Arc::clone(&self.space),
            values,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise maximum (lattice join).
    pub fn join(&self, other: &Self) -> Self {
        self.zip_with(other, f64::max)
    }

    /// Pointwise minimum (lattice meet).
    pub fn meet(&self, other: &Self) -> Self {
        self.zip_with(other, f64::min)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Pointwise minimum against a constant, the base value staying 0.
    pub fn clamp_above(&self, cap: f64) -> Self {
        let mut values: Vec<f64> = self.values.iter().map(|v| v.min(cap)).collect();
        values[0] = self.values[0];
        Self {
            space: Arc::clone(&self.space),
            values,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&FunctionFile {
            values: self.values.clone(),
        })
        .expect("function serialization")
    }

    pub fn from_json(space: &SpaceRef, text: &str) -> Result<Self, FunctionParseError> {
        let file: FunctionFile = serde_json::from_str(text)?;
        Ok(Self::new(space, file.values)?)
    }
}

#[derive(Debug, Error)]
pub enum FunctionParseError {
    #[error("malformed function file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// On-disk form of a function: `{"values": [v0, v1, ...]}` with v0 = 0.
#[derive(Serialize, Deserialize)]
struct FunctionFile {
    values: Vec<f64>,
}
