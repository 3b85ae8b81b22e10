//! The weighted product on Lipschitz functions and its finite-scale spectral
//! theory: units, ideals and hulls, characters, composition operators, and
//! the lattice identity transported through the transform.
//!
//! On a finite space every linear subspace is closed, so the order-complete /
//! weak-star distinctions between subalgebras collapse; what remains testable
//! is the exact correspondence between absorbing ideals and vanishing sets,
//! which is checked directly.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::free::FreeVector;
use crate::metric::{LipschitzFunction, MetricError, SpaceRef};
use crate::transform::{zeta_values, BoundedSpace};
use crate::weight::WeightFunction;

/// Zero threshold for hulls and character verification.
pub const ZERO_TOL: f64 = 1e-12;

/// Residual threshold deciding subspace membership by least squares.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("shift must be nonnegative, got {0}")]
    NegativeShift(f64),
    #[error("the zero set must contain the base point")]
    BaseNotInZeroSet,
    #[error("point index {index} out of range for {points} points")]
    IndexOutOfRange { index: usize, points: usize },
    #[error("point map must send non-base points to non-base points (point {0})")]
    BaseCollision(usize),
    #[error("point map has {got} entries for a space with {expected} points")]
    MapShape { got: usize, expected: usize },
    #[error("ideal verdicts disagree: absorption says {is_ideal}, hull says {equals_hull_ideal}")]
    VerdictMismatch {
        is_ideal: bool,
        equals_hull_ideal: bool,
    },
    #[error("{check}: measured {measured} violates bound {bound}")]
    BoundViolated {
        check: &'static str,
        bound: f64,
        measured: f64,
    },
    #[error("character at point {point} fails multiplicativity by {defect}")]
    CharacterDefect { point: usize, defect: f64 },
    #[error("supports do not correspond: {transformed:?} vs image {expected:?}")]
    SupportMismatch {
        transformed: Vec<usize>,
        expected: Vec<usize>,
    },
}

/// A space together with a weight: the ambient algebra of Lipschitz functions
/// under the weighted product, with zeta cached per point.
#[derive(Debug, Clone)]
pub struct AlgebraContext {
    space: SpaceRef,
    alpha: WeightFunction,
    zeta: Vec<f64>,
}

impl AlgebraContext {
    pub fn new(space: &SpaceRef, alpha: &WeightFunction) -> Self {
        let zeta = zeta_values(space, alpha);
        Self {
            space: Arc::clone(space),
            alpha: alpha.clone(),
            zeta,
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn alpha(&self) -> &WeightFunction {
        &self.alpha
    }

    pub fn zeta(&self, x: usize) -> f64 {
        self.zeta[x]
    }

    /// The weighted product (f g)(x) / zeta(x), vanishing at the base point.
    pub fn odot(&self, f: &LipschitzFunction, g: &LipschitzFunction) -> LipschitzFunction {
        LipschitzFunction::from_fn(&self.space, |x| {
            if x == 0 {
                0.0
            } else {
                f.value(x) * g.value(x) / self.zeta[x]
            }
        })
    }

    /// The unit of the product on a finite space: zeta itself.
    pub fn unit(&self) -> LipschitzFunction {
        LipschitzFunction::from_fn(&self.space, |x| self.zeta[x])
    }

    /// Coordinate indicator of a non-base point.
    pub fn indicator(&self, x: usize) -> LipschitzFunction {
        assert!(
            x != 0 && x < self.space.n(),
            "indicator of a non-base point"
        );
        LipschitzFunction::from_fn(&self.space, |z| if z == x { 1.0 } else { 0.0 })
    }

    /// Pushes a function onto the transformed space: h(mu(x)) = f(x)/zeta(x).
    /// Turns the weighted product into the plain pointwise product.
    pub fn q_dual(&self, b: &BoundedSpace, f: &LipschitzFunction) -> LipschitzFunction {
        debug_assert!(Arc::ptr_eq(b.parent(), &self.space));
        LipschitzFunction::from_fn(b.space(), |x| {
            if x == 0 {
                0.0
            } else {
                f.value(x) / self.zeta[x]
            }
        })
    }

    /// Pulls a function on the transformed space back: f(x) = zeta(x) h(mu(x)).
    pub fn p_dual(&self, b: &BoundedSpace, h: &LipschitzFunction) -> LipschitzFunction {
        debug_assert!(Arc::ptr_eq(b.parent(), &self.space));
        LipschitzFunction::from_fn(&self.space, |x| self.zeta[x] * h.value(x))
    }

    /// The shifted lattice join f v (g - c zeta) for c >= 0; transported
    /// through the transform it is the join against a constant shift.
    pub fn lattice_join_shifted(
        &self,
        f: &LipschitzFunction,
        g: &LipschitzFunction,
        c: f64,
    ) -> Result<LipschitzFunction, AlgebraError> {
        if c < 0.0 || c.is_nan() {
            return Err(AlgebraError::NegativeShift(c));
        }
        Ok(f.join(&g.sub(&self.unit().scale(c))))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SubmultReport {
    /// The constant D(alpha) (K(alpha) + 2).
    pub bound: f64,
    /// Largest observed Lip(f odot g) / (Lip f Lip g).
    pub max_ratio: f64,
    pub trials: usize,
}

/// Drives random pairs through the product and checks the Lipschitz bound
/// Lip(f odot g) <= D(alpha) (K(alpha) + 2) Lip(f) Lip(g).
pub fn check_submultiplicativity(
    ctx: &AlgebraContext,
    trials: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<SubmultReport, AlgebraError> {
    let bound = ctx.alpha.product_bound();
    let mut max_ratio = 0.0f64;
    for _ in 0..trials {
        let f = random_function(&ctx.space, rng);
        let g = random_function(&ctx.space, rng);
        let denom = f.lip_norm() * g.lip_norm();
        if denom == 0.0 {
            continue;
        }
        max_ratio = max_ratio.max(ctx.odot(&f, &g).lip_norm() / denom);
    }
    if max_ratio > bound + tol {
        return Err(AlgebraError::BoundViolated {
            check: "product.submultiplicative",
            bound,
            measured: max_ratio,
        });
    }
    Ok(SubmultReport {
        bound,
        max_ratio,
        trials,
    })
}

fn random_function(space: &SpaceRef, rng: &mut impl Rng) -> LipschitzFunction {
    LipschitzFunction::from_fn(space, |_| rng.gen_range(-1.0..1.0))
}

/// A nonzero multiplicative functional on the algebra, given in coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    point: usize,
    values: Vec<f64>,
}

impl Character {
    /// The point whose normalized evaluation this character is.
    pub fn point(&self) -> usize {
        self.point
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn apply(&self, f: &LipschitzFunction) -> f64 {
        self.values
            .iter()
            .zip(f.values())
            .map(|(&a, &v)| a * v)
            .sum()
    }
}

/// All nonzero multiplicative functionals, found constructively from the
/// indicator basis. Writing a functional as coordinates (a_x), the indicator
/// products force a_x a_y = 0 for x != y and a_x^2 = a_x / zeta(x), so each
/// solution is supported on one point with value 1 / zeta(x). Every candidate
/// is verified against all indicator products before being returned; the
/// zero functional is excluded by construction.
pub fn characters(ctx: &AlgebraContext) -> Result<Vec<Character>, AlgebraError> {
    let n = ctx.space.n();
    let mut found = Vec::with_capacity(n.saturating_sub(1));
    for x in 1..n {
        let mut values = vec![0.0; n];
        values[x] = 1.0 / ctx.zeta(x);
        let candidate = Character { point: x, values };
        let mut defect = 0.0f64;
        for y in 1..n {
            let iy = ctx.indicator(y);
            for z in y..n {
                let iz = ctx.indicator(z);
                let lhs = candidate.apply(&ctx.odot(&iy, &iz));
                let rhs = candidate.apply(&iy) * candidate.apply(&iz);
                defect = defect.max((lhs - rhs).abs());
            }
        }
        if defect > ZERO_TOL {
            return Err(AlgebraError::CharacterDefect { point: x, defect });
        }
        found.push(candidate);
    }
    Ok(found)
}

/// Common zero set of a family of functions; always contains the base point.
pub fn hull(space: &SpaceRef, functions: &[LipschitzFunction]) -> Vec<usize> {
    (0..space.n())
        .filter(|&x| functions.iter().all(|f| f.value(x).abs() <= ZERO_TOL))
        .collect()
}

/// Basis of the functions vanishing on `zero_set`: the coordinate indicators
/// of the points outside it. The set must contain the base point.
pub fn ideal_of(
    ctx: &AlgebraContext,
    zero_set: &[usize],
) -> Result<Vec<LipschitzFunction>, AlgebraError> {
    if !zero_set.contains(&0) {
        return Err(AlgebraError::BaseNotInZeroSet);
    }
    if let Some(&bad) = zero_set.iter().find(|&&x| x >= ctx.space.n()) {
        return Err(AlgebraError::IndexOutOfRange {
            index: bad,
            points: ctx.space.n(),
        });
    }
    Ok((1..ctx.space.n())
        .filter(|x| !zero_set.contains(x))
        .map(|x| ctx.indicator(x))
        .collect())
}

/// A subspace of the function space, kept as an orthonormal basis of value
/// vectors for least-squares membership tests.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Vec<Vec<f64>>,
    n: usize,
}

impl Subspace {
    pub fn span(space: &SpaceRef, functions: &[LipschitzFunction]) -> Self {
        let n = space.n();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for f in functions {
            let mut v = f.values().to_vec();
            project_out(&mut v, &basis);
            let norm = vec_norm(&v);
            if norm > MEMBERSHIP_TOL {
                for entry in &mut v {
                    *entry /= norm;
                }
                basis.push(v);
            }
        }
        Self { basis, n }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, f: &LipschitzFunction) -> bool {
        let mut v = f.values().to_vec();
        let scale = vec_norm(&v).max(1.0);
        project_out(&mut v, &self.basis);
        vec_norm(&v) <= MEMBERSHIP_TOL * scale
    }

    pub fn point_count(&self) -> usize {
        self.n
    }
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let dot: f64 = v.iter().zip(b).map(|(&a, &c)| a * c).sum();
        for (entry, &c) in v.iter_mut().zip(b) {
            *entry -= dot * c;
        }
    }
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Outcome of the ideal test for a subspace.
#[derive(Debug, Clone)]
pub struct IdealCheck {
    /// Whether the span absorbs products with every coordinate indicator.
    pub is_ideal: bool,
    /// Whether the span equals the functions vanishing on its hull.
    pub equals_hull_ideal: bool,
    pub hull: Vec<usize>,
    /// For a non-ideal: a (spanning index, indicator point) product escaping
    /// the span.
    pub escape: Option<(usize, usize)>,
}

/// Decides whether the span of `functions` is an ideal of the weighted
/// product and whether it equals the vanishing ideal of its hull. On finite
/// spaces the two verdicts provably coincide; disagreement is an error.
pub fn ideal_check(
    ctx: &AlgebraContext,
    functions: &[LipschitzFunction],
) -> Result<IdealCheck, AlgebraError> {
    let n = ctx.space.n();
    let span = Subspace::span(&ctx.space, functions);
    let mut is_ideal = true;
    let mut escape = None;
    'outer: for (fi, f) in functions.iter().enumerate() {
        for y in 1..n {
            let product = ctx.odot(f, &ctx.indicator(y));
            if !span.contains(&product) {
                is_ideal = false;
                escape = Some((fi, y));
                break 'outer;
            }
        }
    }
    let hull_points = hull(&ctx.space, functions);
    // The span always sits inside the vanishing ideal of its hull, whose
    // dimension is the number of points off the hull; equality is dimension
    // equality.
    let equals_hull_ideal = span.dim() == n - hull_points.len();
    if is_ideal != equals_hull_ideal {
        return Err(AlgebraError::VerdictMismatch {
            is_ideal,
            equals_hull_ideal,
        });
    }
    Ok(IdealCheck {
        is_ideal,
        equals_hull_ideal,
        hull: hull_points,
        escape,
    })
}

/// The weighted composition operator of a point map g from the points of one
/// context to another: (D_g f)(x) = (zeta(x) / zeta(g x)) f(g x). It is the
/// general form of a unital multiplicative operator between the algebras.
#[derive(Debug, Clone)]
pub struct CompositionOperator {
    source: AlgebraContext,
    target: AlgebraContext,
    map: Vec<usize>,
    factor: Vec<f64>,
}

impl CompositionOperator {
    /// `map[x]` is the source-context point that target point x reads from;
    /// non-base points must map to non-base points.
    pub fn new(
        source: &AlgebraContext,
        target: &AlgebraContext,
        map: Vec<usize>,
    ) -> Result<Self, AlgebraError> {
        if map.len() != target.space.n() {
            return Err(AlgebraError::MapShape {
                got: map.len(),
                expected: target.space.n(),
            });
        }
        for (x, &gx) in map.iter().enumerate().skip(1) {
            if gx == 0 {
                return Err(AlgebraError::BaseCollision(x));
            }
            if gx >= source.space.n() {
                return Err(AlgebraError::IndexOutOfRange {
                    index: gx,
                    points: source.space.n(),
                });
            }
        }
        let factor = (0..target.space.n())
            .map(|x| {
                if x == 0 {
                    0.0
                } else {
                    target.zeta(x) / source.zeta(map[x])
                }
            })
            .collect();
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            map,
            factor,
        })
    }

    pub fn apply(&self, f: &LipschitzFunction) -> LipschitzFunction {
        LipschitzFunction::from_fn(&self.target.space, |x| {
            if x == 0 {
                0.0
            } else {
                self.factor[x] * f.value(self.map[x])
            }
        })
    }

    pub fn source(&self) -> &AlgebraContext {
        &self.source
    }

    pub fn target(&self) -> &AlgebraContext {
        &self.target
    }
}

/// Supports correspond under the transform: transforming a mass distribution
/// rescales coefficients by nonzero factors, so the support of the image is
/// the image of the support. Returns the common support on success.
pub fn check_support_transfer(
    b: &BoundedSpace,
    gamma: &FreeVector,
) -> Result<Vec<usize>, AlgebraError> {
    let expected = gamma.support();
    let transformed = b.p_free().apply(gamma).support();
    if transformed == expected {
        Ok(expected)
    } else {
        Err(AlgebraError::SupportMismatch {
            transformed,
            expected,
        })
    }
}
