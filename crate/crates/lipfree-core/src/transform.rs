//! The bounded transform of a pointed metric space.
//!
//! A weight alpha rescales each unit mass delta(x) by zeta(x) = alpha(d(0,x)),
//! producing the normalized masses mu(x) = delta(x) / zeta(x). The transform
//! of the space is the set {0} union {mu(x)} carried by the free space with
//! its norm metric: a bounded space whose free space is isomorphic to the
//! original one via the basis maps built here. The comparison metric
//! d_alpha(x, y) = d(x, y) / max(zeta(x), zeta(y)) sandwiches the transformed
//! metric within a factor 1 + K(alpha).
//!
//! All transformed distances are computed through the transport solver; the
//! sandwich is a checked property, never a definition.

use std::sync::Arc;

use thiserror::Error;

use crate::free::{free_norm, FreeError, FreeVector, LinearFreeMap};
use crate::metric::{LipschitzFunction, MetricError, PointedMetricSpace, SpaceRef};
use crate::weight::{WeightFunction, WeightKind};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error("{check}: measured {measured} violates bound {bound} ({detail})")]
    BoundViolated {
        check: &'static str,
        bound: f64,
        measured: f64,
        detail: String,
    },
    #[error("annulus [{r}, {big_r}] contains no points")]
    EmptyAnnulus { r: f64, big_r: f64 },
    #[error("point map is not bi-Lipschitz: {0}")]
    NotBiLipschitz(String),
    #[error("point map has {got} entries for a space with {expected} points")]
    MapShape { got: usize, expected: usize },
    #[error("spaces do not match: {0}")]
    SpaceMismatch(&'static str),
}

/// zeta(x) = alpha(d(0, x)) for non-base points, 0 at the base.
pub fn zeta(space: &PointedMetricSpace, alpha: &WeightFunction, x: usize) -> f64 {
    if x == 0 {
        0.0
    } else {
        alpha.eval(space.base_dist(x))
    }
}

pub fn zeta_values(space: &PointedMetricSpace, alpha: &WeightFunction) -> Vec<f64> {
    (0..space.n()).map(|x| zeta(space, alpha, x)).collect()
}

/// mu(x) = delta(x) / zeta(x); the base point maps to the origin.
pub fn mu(space: &SpaceRef, alpha: &WeightFunction, x: usize) -> FreeVector {
    if x == 0 {
        FreeVector::zero(space)
    } else {
        let z = zeta(space, alpha, x);
        FreeVector::from_sparse(space, &[(x, 1.0 / z)]).expect("mu coefficient")
    }
}

/// The comparison metric d(x, y) / max(zeta(x), zeta(y)), with 0/0 = 0.
pub fn d_alpha(space: &PointedMetricSpace, alpha: &WeightFunction, x: usize, y: usize) -> f64 {
    let denom = zeta(space, alpha, x).max(zeta(space, alpha, y));
    if denom == 0.0 {
        0.0
    } else {
        space.dist(x, y) / denom
    }
}

/// The transformed space: point index x corresponds to mu(x) (index 0 is the
/// origin) and distances are free-space norms of mass differences in the
/// parent space.
#[derive(Debug, Clone)]
pub struct BoundedSpace {
    parent: SpaceRef,
    alpha: WeightFunction,
    zeta: Vec<f64>,
    space: SpaceRef,
}

impl BoundedSpace {
    pub fn build(parent: &SpaceRef, alpha: &WeightFunction) -> Result<Self, TransformError> {
        let n = parent.n();
        let zeta = zeta_values(parent, alpha);
        let mut matrix = vec![vec![0.0; n]; n];
        for x in 0..n {
            for y in (x + 1)..n {
                let diff = mu(parent, alpha, x).sub(&mu(parent, alpha, y));
                let d = free_norm(&diff);
                matrix[x][y] = d;
                matrix[y][x] = d;
            }
        }
        let labels = parent.labels().map(|l| {
            let mut out = vec![l[0].clone()];
            out.extend(l.iter().skip(1).map(|name| format!("mu({name})")));
            out
        });
        let space = Arc::new(PointedMetricSpace::validate(&matrix, labels)?);
        Ok(Self {
            parent: Arc::clone(parent),
            alpha: alpha.clone(),
            zeta,
            space,
        })
    }

    pub fn parent(&self) -> &SpaceRef {
        &self.parent
    }

    pub fn alpha(&self) -> &WeightFunction {
        &self.alpha
    }

    /// The transformed space as a validated metric space.
    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn zeta(&self, x: usize) -> f64 {
        self.zeta[x]
    }

    pub fn zetas(&self) -> &[f64] {
        &self.zeta
    }

    /// mu(x) as an element of the free space over the parent.
    pub fn mu(&self, x: usize) -> FreeVector {
        mu(&self.parent, &self.alpha, x)
    }

    /// Transformed distance between mu(x) and mu(y).
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.space.dist(x, y)
    }

    pub fn d_alpha(&self, x: usize, y: usize) -> f64 {
        d_alpha(&self.parent, &self.alpha, x, y)
    }

    /// The basis map delta(x) -> zeta(x) delta_B(mu(x)) from the free space
    /// over the parent to the free space over the transform.
    pub fn p_free(&self) -> LinearFreeMap {
        let columns = (1..self.parent.n())
            .map(|x| {
                FreeVector::from_sparse(&self.space, &[(x, self.zeta[x])]).expect("p_free column")
            })
            .collect();
        LinearFreeMap::from_images(&self.parent, &self.space, columns).expect("p_free shape")
    }

    /// The inverse basis map delta_B(mu(x)) -> mu(x). Input coefficients are
    /// divided by zeta(x), so q_free applied after p_free restores basis
    /// vectors exactly.
    pub fn q_free(&self) -> LinearFreeMap {
        let columns = (1..self.parent.n())
            .map(|x| FreeVector::dirac(&self.parent, x))
            .collect();
        let scales = self.zeta[1..].to_vec();
        LinearFreeMap::from_scaled_images(&self.space, &self.parent, columns, scales)
            .expect("q_free shape")
    }
}

/// Outcome of the pairwise comparison between the transformed metric and the
/// comparison metric: `d_alpha <= d_B <= (1 + K) d_alpha` on every pair.
#[derive(Debug, Clone, Copy)]
pub struct SandwichReport {
    /// Minimum over pairs of d_B - d_alpha (negative = lower bound broken).
    pub min_lower_slack: f64,
    /// Minimum over pairs of (1 + K) d_alpha - d_B.
    pub min_upper_slack: f64,
    pub pairs: usize,
}

pub fn check_sandwich(b: &BoundedSpace, tol: f64) -> Result<SandwichReport, TransformError> {
    let n = b.parent.n();
    let k = b.alpha.kconst();
    let mut report = SandwichReport {
        min_lower_slack: f64::INFINITY,
        min_upper_slack: f64::INFINITY,
        pairs: 0,
    };
    for x in 0..n {
        for y in (x + 1)..n {
            let da = b.d_alpha(x, y);
            let db = b.dist(x, y);
            report.min_lower_slack = report.min_lower_slack.min(db - da);
            report.min_upper_slack = report.min_upper_slack.min((1.0 + k) * da - db);
            report.pairs += 1;
        }
    }
    if report.pairs == 0 {
        report.min_lower_slack = 0.0;
        report.min_upper_slack = 0.0;
    }
    if report.min_lower_slack < -tol {
        return Err(TransformError::BoundViolated {
            check: "sandwich.lower",
            bound: 0.0,
            measured: report.min_lower_slack,
            detail: format!("d_alpha exceeds the transformed metric on {}", b.parent),
        });
    }
    if report.min_upper_slack < -tol {
        return Err(TransformError::BoundViolated {
            check: "sandwich.upper",
            bound: 0.0,
            measured: report.min_upper_slack,
            detail: format!("transformed metric exceeds (1 + K) d_alpha on {}", b.parent),
        });
    }
    Ok(report)
}

/// The two potentials separating mu(x) from mu(y): f(z) = d(z, y) - d(0, y)
/// is 1-Lipschitz, and g = ((zeta / zeta(y)) meet 1) * (|f| meet d(0, y))
/// covers the pairs f misses.
pub fn witness_functions(
    space: &SpaceRef,
    alpha: &WeightFunction,
    y: usize,
) -> (LipschitzFunction, LipschitzFunction) {
    assert!(y != 0, "witnesses are defined for non-base points");
    let dy = space.base_dist(y);
    let f = LipschitzFunction::from_fn(space, |z| space.dist(z, y) - dy);
    let zy = zeta(space, alpha, y);
    let g1: Vec<f64> = (0..space.n())
        .map(|z| (zeta(space, alpha, z) / zy).min(1.0))
        .collect();
    let g2 = f.abs().clamp_above(dy);
    let g = LipschitzFunction::from_fn(space, |z| g1[z] * g2.value(z));
    (f, g)
}

#[derive(Debug, Clone, Copy)]
pub struct WitnessReport {
    /// Largest Lipschitz norm of the distance witness over all y.
    pub max_f_lip: f64,
    /// Minimum over pairs of max(|<mu(x)-mu(y), f>|, |<mu(x)-mu(y), g>|) - d_alpha.
    pub min_slack: f64,
    pub pairs: usize,
}

/// Checks that for every y != 0 the pair of witnesses separates mu(x) from
/// mu(y) at scale d_alpha(x, y), for every x.
pub fn check_witnesses(
    space: &SpaceRef,
    alpha: &WeightFunction,
    tol: f64,
) -> Result<WitnessReport, TransformError> {
    let n = space.n();
    let zetas = zeta_values(space, alpha);
    let pairing = |h: &LipschitzFunction, x: usize, y: usize| -> f64 {
        let at_x = if x == 0 { 0.0 } else { h.value(x) / zetas[x] };
        at_x - h.value(y) / zetas[y]
    };
    let mut report = WitnessReport {
        max_f_lip: 0.0,
        min_slack: f64::INFINITY,
        pairs: 0,
    };
    for y in 1..n {
        let (f, g) = witness_functions(space, alpha, y);
        report.max_f_lip = report.max_f_lip.max(f.lip_norm());
        for x in 0..n {
            if x == y {
                continue;
            }
            let da = d_alpha(space, alpha, x, y);
            let separation = pairing(&f, x, y).abs().max(pairing(&g, x, y).abs());
            report.min_slack = report.min_slack.min(separation - da);
            report.pairs += 1;
        }
    }
    if report.pairs == 0 {
        report.min_slack = 0.0;
    }
    if report.max_f_lip > 1.0 + tol {
        return Err(TransformError::BoundViolated {
            check: "witness.lip",
            bound: 1.0,
            measured: report.max_f_lip,
            detail: "distance witness is not 1-Lipschitz".into(),
        });
    }
    if report.min_slack < -tol {
        return Err(TransformError::BoundViolated {
            check: "witness.separation",
            bound: 0.0,
            measured: report.min_slack,
            detail: "witness pair separates below d_alpha".into(),
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub struct MuNormReport {
    /// Minimum over x of D(alpha) - |mu(x)|.
    pub min_upper_slack: f64,
    /// Minimum over x of |mu(x)| - lower bound.
    pub min_lower_slack: f64,
}

/// Checks the norm window for every normalized mass: |mu(x)| <= D(alpha) and
/// |mu(x)| >= min(1/Lip(alpha), d/alpha(d)) with d the smallest base
/// distance; when alpha vanishes at 0 the floor 1/Lip(alpha) holds alone.
pub fn check_mu_norms(b: &BoundedSpace, tol: f64) -> Result<MuNormReport, TransformError> {
    let parent = &b.parent;
    let alpha = &b.alpha;
    let mut report = MuNormReport {
        min_upper_slack: f64::INFINITY,
        min_lower_slack: f64::INFINITY,
    };
    let Some(d) = parent.min_base_dist() else {
        return Ok(MuNormReport {
            min_upper_slack: 0.0,
            min_lower_slack: 0.0,
        });
    };
    let mut floor = (1.0 / alpha.lip()).min(d / alpha.eval(d));
    if alpha.alpha0() == 0.0 {
        floor = floor.max(1.0 / alpha.lip());
    }
    for x in 1..parent.n() {
        let norm = b.dist(0, x);
        report.min_upper_slack = report.min_upper_slack.min(alpha.dconst() - norm);
        report.min_lower_slack = report.min_lower_slack.min(norm - floor);
    }
    if report.min_upper_slack < -tol || report.min_lower_slack < -tol {
        let (check, measured) = if report.min_upper_slack < -tol {
            ("mu_norm.upper", report.min_upper_slack)
        } else {
            ("mu_norm.lower", report.min_lower_slack)
        };
        return Err(TransformError::BoundViolated {
            check,
            bound: 0.0,
            measured,
            detail: format!("norm window broken on {}", parent),
        });
    }
    Ok(report)
}

/// Bi-Lipschitz distortion of the transform restricted to the annulus
/// {x : r <= d(0, x) <= R}: the largest expansion times the largest
/// contraction of mu over pairs in the annulus. A single point gives 1.
pub fn annulus_distortion(b: &BoundedSpace, r: f64, big_r: f64) -> Result<f64, TransformError> {
    let parent = &b.parent;
    let points: Vec<usize> = (1..parent.n())
        .filter(|&x| {
            let d = parent.base_dist(x);
            r <= d && d <= big_r
        })
        .collect();
    if points.is_empty() {
        return Err(TransformError::EmptyAnnulus { r, big_r });
    }
    let mut expand = 0.0f64;
    let mut contract = 0.0f64;
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            let ratio = b.dist(x, y) / parent.dist(x, y);
            expand = expand.max(ratio);
            contract = contract.max(1.0 / ratio);
        }
    }
    if expand == 0.0 {
        return Ok(1.0);
    }
    Ok(expand * contract)
}

/// A base-preserving map between the points of two spaces, `map[x]` being the
/// target index of source point x.
#[derive(Debug, Clone)]
pub struct PointMap {
    source: SpaceRef,
    target: SpaceRef,
    map: Vec<usize>,
}

impl PointMap {
    /// Validates base preservation and injectivity; on finite validated
    /// spaces an injective base-preserving map is automatically bi-Lipschitz
    /// onto its image.
    pub fn new(
        source: &SpaceRef,
        target: &SpaceRef,
        map: Vec<usize>,
    ) -> Result<Self, TransformError> {
        if map.len() != source.n() {
            return Err(TransformError::MapShape {
                got: map.len(),
                expected: source.n(),
            });
        }
        if map[0] != 0 {
            return Err(TransformError::NotBiLipschitz(
                "the base point must map to the base point".into(),
            ));
        }
        for (x, &fx) in map.iter().enumerate().skip(1) {
            if fx >= target.n() {
                return Err(TransformError::MapShape {
                    got: fx,
                    expected: target.n(),
                });
            }
            if fx == 0 {
                return Err(TransformError::NotBiLipschitz(format!(
                    "point {x} collides with the base point"
                )));
            }
        }
        let mut seen = vec![false; target.n()];
        for (x, &fx) in map.iter().enumerate() {
            if seen[fx] {
                return Err(TransformError::NotBiLipschitz(format!(
                    "point {x} collides with an earlier point at image {fx}"
                )));
            }
            seen[fx] = true;
        }
        Ok(Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            map,
        })
    }

    pub fn identity(space: &SpaceRef) -> Self {
        Self {
            source: Arc::clone(space),
            target: Arc::clone(space),
            map: (0..space.n()).collect(),
        }
    }

    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef {
        &self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn indices(&self) -> &[usize] {
        &self.map
    }

    /// Largest expansion ratio d'(f x, f y) / d(x, y).
    pub fn lip(&self) -> f64 {
        let mut best = 0.0f64;
        for x in 0..self.source.n() {
            for y in (x + 1)..self.source.n() {
                let ratio = self.target.dist(self.map[x], self.map[y]) / self.source.dist(x, y);
                best = best.max(ratio);
            }
        }
        best
    }

    /// Lipschitz constant of the inverse on the image.
    pub fn inverse_lip(&self) -> f64 {
        let mut best = 0.0f64;
        for x in 0..self.source.n() {
            for y in (x + 1)..self.source.n() {
                let ratio = self.source.dist(x, y) / self.target.dist(self.map[x], self.map[y]);
                best = best.max(ratio);
            }
        }
        best
    }

    pub fn is_isometry(&self) -> bool {
        (0..self.source.n()).all(|x| {
            (x + 1..self.source.n())
                .all(|y| self.source.dist(x, y) == self.target.dist(self.map[x], self.map[y]))
        })
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self, TransformError> {
        if !Arc::ptr_eq(&self.source, &inner.target) {
            return Err(TransformError::SpaceMismatch(
                "composition needs matching middle spaces",
            ));
        }
        let map = inner.map.iter().map(|&x| self.map[x]).collect();
        Ok(Self {
            source: Arc::clone(&inner.source),
            target: Arc::clone(&self.target),
            map,
        })
    }
}

/// The induced map between transformed spaces, sending mu(x) to mu(f x).
pub fn functor_map(
    f: &PointMap,
    bm: &BoundedSpace,
    bn: &BoundedSpace,
) -> Result<PointMap, TransformError> {
    if !Arc::ptr_eq(f.source(), bm.parent()) || !Arc::ptr_eq(f.target(), bn.parent()) {
        return Err(TransformError::SpaceMismatch(
            "functor input must map between the parents of the transforms",
        ));
    }
    PointMap::new(bm.space(), bn.space(), f.map.clone())
}

#[derive(Debug, Clone, Copy)]
pub struct FunctorReport {
    /// Lipschitz constant of the induced map on the transformed spaces.
    pub measured: f64,
    /// Asserted bound, present for the identity and shifted weights only.
    pub bound: Option<f64>,
}

/// Measures the induced map's Lipschitz constant and, for the identity and
/// shifted weights, asserts the assembled bound
/// (1 + K) Lip(f) max(1, Lip(f^{-1})).
pub fn check_functor_bound(
    f: &PointMap,
    bm: &BoundedSpace,
    bn: &BoundedSpace,
    tol: f64,
) -> Result<FunctorReport, TransformError> {
    let induced = functor_map(f, bm, bn)?;
    let measured = induced.lip();
    let bound = match bm.alpha.kind() {
        WeightKind::Identity | WeightKind::Shifted => {
            Some((1.0 + bm.alpha.kconst()) * f.lip() * f.inverse_lip().max(1.0))
        }
        _ => None,
    };
    if let Some(bound) = bound {
        if measured > bound * (1.0 + tol) + tol {
            return Err(TransformError::BoundViolated {
                check: "functor.lip",
                bound,
                measured,
                detail: "induced map exceeds the assembled Lipschitz bound".into(),
            });
        }
    }
    Ok(FunctorReport { measured, bound })
}

#[derive(Debug, Clone, Copy)]
pub struct IsoReport {
    pub p_norm: f64,
    pub q_norm: f64,
    /// Always 1 + 2 K(alpha).
    pub product_bound: f64,
}

/// Checks the two basis maps: their composition restores basis vectors
/// exactly, the inverse map has operator norm 1, and the product of the two
/// operator norms stays below 1 + 2 K(alpha).
pub fn check_iso_maps(b: &BoundedSpace, tol: f64) -> Result<IsoReport, TransformError> {
    let p = b.p_free();
    let q = b.q_free();
    let round_trip = q.compose(&p)?;
    for x in 1..b.parent.n() {
        let col = round_trip.column(x);
        for (t, &c) in col.coeffs().iter().enumerate() {
            let expected = if t == x { 1.0 } else { 0.0 };
            if c != expected {
                return Err(TransformError::BoundViolated {
                    check: "iso.round_trip",
                    bound: 0.0,
                    measured: (c - expected).abs(),
                    detail: format!("basis vector {x} not restored exactly"),
                });
            }
        }
    }
    let q_norm = q.operator_norm();
    let p_norm = p.operator_norm();
    let product_bound = 1.0 + 2.0 * b.alpha.kconst();
    if q_norm > 1.0 + tol {
        return Err(TransformError::BoundViolated {
            check: "iso.q_norm",
            bound: 1.0,
            measured: q_norm,
            detail: "inverse basis map is not norm-one".into(),
        });
    }
    if p_norm * q_norm > product_bound + tol {
        return Err(TransformError::BoundViolated {
            check: "iso.product",
            bound: product_bound,
            measured: p_norm * q_norm,
            detail: "operator-norm product exceeds 1 + 2K".into(),
        });
    }
    Ok(IsoReport {
        p_norm,
        q_norm,
        product_bound,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct EquivalenceReport {
    pub distortion: f64,
    pub bound: f64,
}

/// Compares the transform under `alpha` with the transform under the
/// canonical weight of its class (identity when alpha(0) = 0, shifted
/// otherwise): the identity map between the two transformed spaces has
/// distortion at most 2 (1 + K(alpha)) C / c, where c alpha* <= alpha <=
/// C alpha* pointwise.
pub fn check_weight_equivalence(
    parent: &SpaceRef,
    alpha: &WeightFunction,
    tol: f64,
) -> Result<EquivalenceReport, TransformError> {
    let (canonical, ratio) = if alpha.alpha0() == 0.0 {
        // alpha <= Lip(alpha) t and alpha >= t / D(alpha).
        (WeightFunction::identity(), alpha.lip() * alpha.dconst())
    } else {
        let upper = alpha.alpha0().max(alpha.lip());
        let lower = alpha.inf_on_unit_interval().min(1.0 / alpha.dconst()) / 2.0;
        (WeightFunction::shifted(), upper / lower)
    };
    let bound = 2.0 * (1.0 + alpha.kconst()) * ratio;
    let b_alpha = BoundedSpace::build(parent, alpha)?;
    let b_canon = BoundedSpace::build(parent, &canonical)?;
    let mut expand = 0.0f64;
    let mut contract = 0.0f64;
    for x in 0..parent.n() {
        for y in (x + 1)..parent.n() {
            let ratio = b_alpha.dist(x, y) / b_canon.dist(x, y);
            expand = expand.max(ratio);
            contract = contract.max(1.0 / ratio);
        }
    }
    let distortion = if expand == 0.0 {
        1.0
    } else {
        expand * contract
    };
    if distortion > bound + tol {
        return Err(TransformError::BoundViolated {
            check: "weights.equivalence",
            bound,
            measured: distortion,
            detail: "identity map between transforms exceeds the class bound".into(),
        });
    }
    Ok(EquivalenceReport { distortion, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::PointedMetricSpace;

    fn line(coords: &[f64]) -> SpaceRef {
        Arc::new(PointedMetricSpace::from_line_points(coords).unwrap())
    }

    #[test]
    fn zeta_and_mu_at_base_and_beyond() {
        let space = line(&[0.0, 2.0]);
        let id = WeightFunction::identity();
        let shifted = WeightFunction::shifted();
        assert_eq!(zeta(&space, &id, 0), 0.0);
        assert_eq!(zeta(&space, &id, 1), 2.0);
        assert_eq!(zeta(&space, &shifted, 1), 3.0);
        assert!(mu(&space, &id, 0).support().is_empty());
        assert_eq!(mu(&space, &shifted, 1).coeff(1), 1.0 / 3.0);
    }

    #[test]
    fn d_alpha_conventions() {
        let space = line(&[0.0, 1.0, 2.0]);
        let id = WeightFunction::identity();
        assert_eq!(d_alpha(&space, &id, 0, 0), 0.0);
        assert_eq!(d_alpha(&space, &id, 1, 2), 0.5);
        assert_eq!(d_alpha(&space, &id, 1, 0), 1.0);
        assert_eq!(d_alpha(&space, &id, 2, 0), 1.0);
    }

    #[test]
    fn identity_weight_puts_points_on_the_unit_sphere() {
        let space = line(&[0.0, 1.0, 3.0, 10.0]);
        let b = BoundedSpace::build(&space, &WeightFunction::identity()).unwrap();
        for x in 1..space.n() {
            assert!((b.dist(0, x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_point_space_transforms_to_itself() {
        let space = Arc::new(PointedMetricSpace::validate(&[vec![0.0]], None).unwrap());
        let b = BoundedSpace::build(&space, &WeightFunction::identity()).unwrap();
        assert_eq!(b.space().n(), 1);
    }

    #[test]
    fn sandwich_holds_on_a_line() {
        let space = line(&[0.0, 0.5, 1.0, 4.0, 9.0]);
        for alpha in [
            WeightFunction::identity(),
            WeightFunction::shifted(),
            WeightFunction::linear(3.0).unwrap(),
        ] {
            let b = BoundedSpace::build(&space, &alpha).unwrap();
            let report = check_sandwich(&b, 1e-9).unwrap();
            assert!(report.min_lower_slack >= -1e-9);
            assert!(report.min_upper_slack >= -1e-9);
        }
    }

    #[test]
    fn lower_bound_is_tight_against_the_base_for_identity() {
        let space = line(&[0.0, 2.0, 5.0]);
        let b = BoundedSpace::build(&space, &WeightFunction::identity()).unwrap();
        for x in 1..space.n() {
            assert!((b.dist(0, x) - b.d_alpha(0, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_is_exact_and_norms_bounded() {
        let space = line(&[0.0, 1.0, 2.0, 7.0]);
        let alpha = WeightFunction::shifted();
        let b = BoundedSpace::build(&space, &alpha).unwrap();
        let report = check_iso_maps(&b, 1e-9).unwrap();
        assert!(report.q_norm <= 1.0 + 1e-9);
        assert!(report.p_norm * report.q_norm <= 1.0 + 2.0 * alpha.kconst() + 1e-9);
    }

    #[test]
    fn two_point_identity_transform_has_unit_p_norm() {
        // Single molecule: the image of delta(x) has norm d(0, x).
        let space = line(&[0.0, 5.0]);
        let b = BoundedSpace::build(&space, &WeightFunction::identity()).unwrap();
        assert!((b.p_free().operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witnesses_separate_on_small_spaces() {
        let space = line(&[0.0, 1.0, 2.5, 6.0]);
        for alpha in [WeightFunction::identity(), WeightFunction::shifted()] {
            let report = check_witnesses(&space, &alpha, 1e-9).unwrap();
            assert!(report.max_f_lip <= 1.0 + 1e-12);
            assert!(report.min_slack >= -1e-9);
        }
    }

    #[test]
    fn witness_g_hits_minus_d_alpha_inside_the_ball() {
        // zeta(x) < zeta(y) and d(x, y) < d(0, y): the product witness pairs
        // to exactly -d_alpha(x, y).
        let space = line(&[0.0, 2.0, 3.0]);
        let alpha = WeightFunction::identity();
        let (x, y) = (1, 2);
        let (_, g) = witness_functions(&space, &alpha, y);
        let zx = zeta(&space, &alpha, x);
        let zy = zeta(&space, &alpha, y);
        let pairing = g.value(x) / zx - g.value(y) / zy;
        assert!((pairing + d_alpha(&space, &alpha, x, y)).abs() < 1e-12);
    }

    #[test]
    fn mu_norm_window() {
        let space = line(&[0.0, 1.0, 4.0]);
        // alpha = 3t pins |mu(x)| = 1/3 = 1/Lip.
        let b = BoundedSpace::build(&space, &WeightFunction::linear(3.0).unwrap()).unwrap();
        for x in 1..space.n() {
            assert!((b.dist(0, x) - 1.0 / 3.0).abs() < 1e-12);
        }
        check_mu_norms(&b, 1e-9).unwrap();
        // shifted weight at distance 1: |mu| = 1/2 >= min(1, 1/2).
        let b = BoundedSpace::build(&space, &WeightFunction::shifted()).unwrap();
        assert!((b.dist(0, 1) - 0.5).abs() < 1e-12);
        check_mu_norms(&b, 1e-9).unwrap();
    }

    #[test]
    fn annulus_of_one_point_has_distortion_one() {
        let space = line(&[0.0, 1.0, 10.0]);
        let b = BoundedSpace::build(&space, &WeightFunction::identity()).unwrap();
        assert_eq!(annulus_distortion(&b, 0.5, 2.0).unwrap(), 1.0);
        assert!(matches!(
            annulus_distortion(&b, 20.0, 30.0),
            Err(TransformError::EmptyAnnulus { .. })
        ));
    }

    #[test]
    fn functor_identity_and_composition() {
        let space = line(&[0.0, 1.0, 3.0]);
        let id = PointMap::identity(&space);
        let composed = id.compose(&id).unwrap();
        assert_eq!(composed.indices(), id.indices());
        assert!(id.is_isometry());
    }

    #[test]
    fn collisions_are_rejected() {
        let space = line(&[0.0, 1.0, 3.0]);
        assert!(matches!(
            PointMap::new(&space, &space, vec![0, 1, 1]),
            Err(TransformError::NotBiLipschitz(_))
        ));
        assert!(matches!(
            PointMap::new(&space, &space, vec![1, 0, 2]),
            Err(TransformError::NotBiLipschitz(_))
        ));
    }

    #[test]
    fn weight_equivalence_within_class_bound() {
        let space = line(&[0.0, 0.25, 1.0, 6.0]);
        // Vanishing at zero: compare against the identity weight.
        let steep = WeightFunction::piecewise(vec![[0.0, 0.0], [1.0, 2.0]], 0.5).unwrap();
        let report = check_weight_equivalence(&space, &steep, 1e-9).unwrap();
        assert!(report.distortion <= report.bound + 1e-9);
        // Positive at zero: compare against the shifted weight.
        let lifted = WeightFunction::piecewise(vec![[0.0, 2.0], [1.0, 1.0]], 2.0).unwrap();
        let report = check_weight_equivalence(&space, &lifted, 1e-9).unwrap();
        assert!(report.distortion <= report.bound + 1e-9);
    }
}
