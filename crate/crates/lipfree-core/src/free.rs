//! Elements of the free space over a finite pointed metric space and their
//! exact transport norm.
//!
//! A [`FreeVector`] is a finitely supported coefficient vector on the
//! non-base points. Its norm is the cheapest way to write it as mass moving
//! between points, with the base point absorbing any imbalance; the primal
//! value comes from a transportation solver and [`dual_norm`] provides an
//! independent certificate by maximizing over 1-Lipschitz potentials with a
//! generic LP solver.

use std::collections::BTreeMap;
use std::sync::Arc;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::transport_cost;
use crate::metric::{LipschitzFunction, MetricError, SpaceRef};

/// Coefficients with absolute value at most this are treated as zero when
/// computing supports; constructed vectors have exactly representable zeros,
/// so this only guards arithmetic drift.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FreeError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("coefficient vector has {got} entries for a space with {expected} points")]
    CoeffCountMismatch { got: usize, expected: usize },
    #[error("coefficient {value} at the base point; the base carries no mass")]
    MassAtBase { value: f64 },
    #[error("coefficient at point {index} is not finite: {value}")]
    NonFiniteCoeff { index: usize, value: f64 },
    #[error("point index {index} out of range for {points} points")]
    IndexOutOfRange { index: usize, points: usize },
    #[error("vectors live on different spaces")]
    SpaceMismatch,
    #[error("linear program failed: {0}")]
    SolverFailure(String),
    #[error("space is not the line metric induced by the given points")]
    NotALineSpace,
    #[error("map needs a source space with at least one non-base point")]
    EmptySource,
}

/// A finitely supported element of the free space: one real coefficient per
/// non-base point. The base point's coefficient is identically zero (the
/// base spans the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct FreeVector {
    space: SpaceRef,
    coeff: Vec<f64>,
}

impl FreeVector {
    pub fn zero(space: &SpaceRef) -> Self {
        Self {
            space: Arc::clone(space),
            coeff: vec![0.0; space.n()],
        }
    }

    /// The unit mass at point `x`; `x = 0` gives the origin.
    pub fn dirac(space: &SpaceRef, x: usize) -> Self {
        let mut v = Self::zero(space);
        assert!(x < space.n(), "point index out of range");
        if x != 0 {
            v.coeff[x] = 1.0;
        }
        v
    }

    pub fn from_coeff(space: &SpaceRef, coeff: Vec<f64>) -> Result<Self, FreeError> {
        if coeff.len() != space.n() {
            return Err(FreeError::CoeffCountMismatch {
                got: coeff.len(),
                expected: space.n(),
            });
        }
        if coeff[0] != 0.0 {
            return Err(FreeError::MassAtBase { value: coeff[0] });
        }
        if let Some((index, &value)) = coeff.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(FreeError::NonFiniteCoeff { index, value });
        }
        Ok(Self {
            space: Arc::clone(space),
            coeff,
        })
    }

    pub fn from_sparse(space: &SpaceRef, entries: &[(usize, f64)]) -> Result<Self, FreeError> {
        let mut coeff = vec![0.0; space.n()];
        for &(index, value) in entries {
            if index >= space.n() {
                return Err(FreeError::IndexOutOfRange {
                    index,
                    points: space.n(),
                });
            }
            coeff[index] += value;
        }
        Self::from_coeff(space, coeff)
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn coeff(&self, x: usize) -> f64 {
        self.coeff[x]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeff
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.coeff.len(), other.coeff.len());
        let coeff = self
            .coeff
            .iter()
            .zip(&other.coeff)
            .map(|(&a, &b)| a + b)
            .collect();
        Self {
            space: Arc::clone(&self.space),
            coeff,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.coeff.len(), other.coeff.len());
        let coeff = self
            .coeff
            .iter()
            .zip(&other.coeff)
            .map(|(&a, &b)| a - b)
            .collect();
        Self {
            space: Arc::clone(&self.space),
            coeff,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            space: Arc::clone(&self.space),
            coeff: self.coeff.iter().map(|&a| c * a).collect(),
        }
    }

    /// Duality bracket with a Lipschitz function: `sum coeff[x] * f(x)`.
    pub fn pair(&self, f: &LipschitzFunction) -> f64 {
        debug_assert_eq!(self.coeff.len(), f.values().len());
        self.coeff
            .iter()
            .zip(f.values())
            .map(|(&a, &v)| a * v)
            .sum()
    }

    /// Points carrying mass: `{x : |coeff[x]| > SUPPORT_TOL}`.
    pub fn support(&self) -> Vec<usize> {
        self.coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > SUPPORT_TOL)
            .map(|(x, _)| x)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let coeff: BTreeMap<String, f64> = self
            .coeff
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c != 0.0)
            .map(|(x, &c)| (x.to_string(), c))
            .collect();
        serde_json::to_string_pretty(&VectorFile { coeff }).expect("vector serialization")
    }

    pub fn from_json(space: &SpaceRef, text: &str) -> Result<Self, VectorParseError> {
        let file: VectorFile = serde_json::from_str(text)?;
        let mut entries = Vec::with_capacity(file.coeff.len());
        for (key, value) in file.coeff {
            let index: usize = key
                .parse()
                .map_err(|_| VectorParseError::BadIndex(key.clone()))?;
            entries.push((index, value));
        }
        Ok(Self::from_sparse(space, &entries)?)
    }
}

#[derive(Debug, Error)]
pub enum VectorParseError {
    #[error("malformed vector file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("coefficient key {0:?} is not a point index")]
    BadIndex(String),
    #[error(transparent)]
    Free(#[from] FreeError),
}

/// On-disk form: `{"coeff": {"<point index>": <real>, ...}}`.
#[derive(Serialize, Deserialize)]
struct VectorFile {
    coeff: BTreeMap<String, f64>,
}

/// Exact free-space norm: the minimum total cost of a transport plan whose
/// net divergence matches the coefficients, with the base point absorbing
/// the imbalance.
pub fn free_norm(gamma: &FreeVector) -> f64 {
    let mut supply = gamma.coeff.clone();
    let total: f64 = supply.iter().skip(1).sum();
    supply[0] = -total;
    transport_cost(gamma.space(), &supply)
}

/// Maximizes `<gamma, f>` over potentials with f(0) = 0 and
/// |f(x) - f(y)| <= d(x, y), solved as an explicit linear program. Returns
/// the attained value together with the maximizing potential. By strong
/// duality the value equals [`free_norm`]; the two routes share no code.
pub fn dual_norm(gamma: &FreeVector) -> Result<(f64, LipschitzFunction), FreeError> {
    let space = gamma.space();
    let n = space.n();
    if n == 1 {
        return Ok((0.0, LipschitzFunction::zero(space)));
    }
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (1..n)
        .map(|x| {
            let bound = space.base_dist(x);
            problem.add_var(gamma.coeff(x), (-bound, bound))
        })
        .collect();
    for x in 1..n {
        for y in (x + 1)..n {
            let d = space.dist(x, y);
            problem.add_constraint(
                [(vars[x - 1], 1.0), (vars[y - 1], -1.0)],
                ComparisonOp::Le,
                d,
            );
            problem.add_constraint(
                [(vars[x - 1], 1.0), (vars[y - 1], -1.0)],
                ComparisonOp::Ge,
                -d,
            );
        }
    }
    let solution = problem
        .solve()
        .map_err(|e| FreeError::SolverFailure(e.to_string()))?;
    let mut values = vec![0.0; n];
    for x in 1..n {
        values[x] = solution[vars[x - 1]];
    }
    let witness = LipschitzFunction::new(space, values)?;
    let value = gamma.pair(&witness);
    Ok((value, witness))
}

/// A linear map between free spaces, determined by the images of the basis
/// vectors of the source. Input coefficients are divided by `input_scale`
/// before the column image is accumulated, so a map whose column was scaled
/// by the same factor inverts it exactly.
#[derive(Debug, Clone)]
pub struct LinearFreeMap {
    source: SpaceRef,
    target: SpaceRef,
    columns: Vec<FreeVector>,
    input_scale: Vec<f64>,
}

impl LinearFreeMap {
    /// Builds the map sending the basis vector of source point `x` (for
    /// x = 1..n-1) to `columns[x - 1]`. The base point always maps to 0.
    pub fn from_images(
        source: &SpaceRef,
        target: &SpaceRef,
        columns: Vec<FreeVector>,
    ) -> Result<Self, FreeError> {
        let expected = source.n().saturating_sub(1);
        if columns.len() != expected {
            return Err(FreeError::CoeffCountMismatch {
                got: columns.len(),
                expected,
            });
        }
        if columns.iter().any(|c| !Arc::ptr_eq(c.space(), target)) {
            return Err(FreeError::SpaceMismatch);
        }
        let input_scale = vec![1.0; expected];
        Ok(Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            columns,
            input_scale,
        })
    }

    /// As [`from_images`](Self::from_images), with per-column divisors
    /// applied to input coefficients.
    pub fn from_scaled_images(
        source: &SpaceRef,
        target: &SpaceRef,
        columns: Vec<FreeVector>,
        input_scale: Vec<f64>,
    ) -> Result<Self, FreeError> {
        let mut map = Self::from_images(source, target, columns)?;
        if input_scale.len() != map.input_scale.len() {
            return Err(FreeError::CoeffCountMismatch {
                got: input_scale.len(),
                expected: map.input_scale.len(),
            });
        }
        map.input_scale = input_scale;
        Ok(map)
    }

    pub fn identity(space: &SpaceRef) -> Self {
        let columns = (1..space.n())
            .map(|x| FreeVector::dirac(space, x))
            .collect();
        Self {
            source: Arc::clone(space),
            target: Arc::clone(space),
            columns,
            input_scale: vec![1.0; space.n().saturating_sub(1)],
        }
    }

    pub fn scaled_identity(space: &SpaceRef, c: f64) -> Self {
        let columns = (1..space.n())
            .map(|x| FreeVector::dirac(space, x).scale(c))
            .collect();
        Self {
            source: Arc::clone(space),
            target: Arc::clone(space),
            columns,
            input_scale: vec![1.0; space.n().saturating_sub(1)],
        }
    }

    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef {
        &self.target
    }

    /// Image of the basis vector of source point `x >= 1`.
    pub fn column(&self, x: usize) -> &FreeVector {
        &self.columns[x - 1]
    }

    pub fn apply(&self, gamma: &FreeVector) -> FreeVector {
        debug_assert_eq!(gamma.coeffs().len(), self.source.n());
        let mut image = FreeVector::zero(&self.target);
        for x in 1..self.source.n() {
            let a = gamma.coeff(x);
            if a == 0.0 {
                continue;
            }
            let weight = a / self.input_scale[x - 1];
            for (t, &c) in self.columns[x - 1].coeffs().iter().enumerate() {
                if c != 0.0 {
                    image.coeff[t] += weight * c;
                }
            }
        }
        image
    }

    /// Composition `self . inner`, evaluated column by column so that
    /// matching scale factors cancel by division.
    pub fn compose(&self, inner: &Self) -> Result<Self, FreeError> {
        if !Arc::ptr_eq(&self.source, &inner.target) {
            return Err(FreeError::SpaceMismatch);
        }
        let columns = inner.columns.iter().map(|col| self.apply(col)).collect();
        Ok(Self {
            source: Arc::clone(&inner.source),
            target: Arc::clone(&self.target),
            columns,
            input_scale: inner.input_scale.clone(),
        })
    }

    /// Exact operator norm. The unit ball of the free space over a finite
    /// space is the convex hull of the elementary molecules
    /// (delta(x) - delta(y)) / d(x, y), so the norm is the maximum of
    /// `free_norm(T(delta(x) - delta(y))) / d(x, y)` over pairs, the base
    /// point mapping to 0.
    pub fn operator_norm(&self) -> f64 {
        let n = self.source.n();
        let mut best = 0.0f64;
        for x in 0..n {
            for y in (x + 1)..n {
                let gamma =
                    FreeVector::dirac(&self.source, x).sub(&FreeVector::dirac(&self.source, y));
                let image_norm = free_norm(&self.apply(&gamma));
                best = best.max(image_norm / self.source.dist(x, y));
            }
        }
        best
    }
}

/// Norm of `gamma` on a line space together with the L1 norm of its image
/// under the step-function map `delta(t_i) -> indicator of [0, t_i)`. The two
/// agree because the map extends to an isometry; the caller asserts equality.
///
/// `coords` must be the increasing coordinates the space was built from,
/// starting at 0.
pub fn line_isometry_values(coords: &[f64], gamma: &FreeVector) -> Result<(f64, f64), FreeError> {
    let space = gamma.space();
    if coords.len() != space.n() || coords.is_empty() || coords[0] != 0.0 {
        return Err(FreeError::NotALineSpace);
    }
    for i in 0..coords.len() {
        for j in 0..coords.len() {
            if space.dist(i, j) != (coords[i] - coords[j]).abs() {
                return Err(FreeError::NotALineSpace);
            }
        }
    }
    // The image step function is constant on each cell [t_{k-1}, t_k) with
    // value sum_{i >= k} a_i.
    let mut tail = 0.0;
    let mut tails = vec![0.0; coords.len()];
    for k in (1..coords.len()).rev() {
        tail += gamma.coeff(k);
        tails[k] = tail;
    }
    let l1: f64 = (1..coords.len())
        .map(|k| (coords[k] - coords[k - 1]) * tails[k].abs())
        .sum();
    Ok((free_norm(gamma), l1))
}

/// Norm of `gamma` on the integer line {0, 1, ..., n} together with the l1
/// norm of its image under the cumulative map `delta(k) -> e_1 + ... + e_k`.
pub fn l1_isometry_values(gamma: &FreeVector) -> Result<(f64, f64), FreeError> {
    let space = gamma.space();
    let coords: Vec<f64> = (0..space.n()).map(|i| i as f64).collect();
    line_isometry_values(&coords, gamma)
}
