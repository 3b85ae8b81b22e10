//! Weight functions alpha on (0, infinity) and their derived constants.
//!
//! The supported family is piecewise linear: the identity weight t, the
//! shifted weight 1 + t, linear scalings c*t, and explicit breakpoint lists
//! with a final slope. On this family Lip(alpha), D(alpha) = sup t/alpha(t),
//! K(alpha) = Lip(alpha) * D(alpha), and alpha(0+) are all computed exactly
//! from endpoints: t/alpha(t) is monotone on each linear piece, so the
//! supremum is attained at a breakpoint or in a one-sided limit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("linear weight needs a positive finite scale, got {0}")]
    BadScale(f64),
    #[error("weight must be positive on (0, inf): alpha({t}) = {value}")]
    NonPositive { t: f64, value: f64 },
    #[error("final slope {0} gives sup t/alpha(t) = infinity")]
    UnboundedD(f64),
    #[error("breakpoints must be finite, start at t = 0, and be strictly increasing in t")]
    BadBreakpoints,
    #[error("unknown weight kind {0:?}")]
    UnknownKind(String),
}

#[derive(Debug, Error)]
pub enum WeightParseError {
    #[error("malformed weight file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// Shape of a weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// alpha(t) = t
    Identity,
    /// alpha(t) = 1 + t
    Shifted,
    /// alpha(t) = c * t
    Linear { c: f64 },
    /// Linear interpolation through `breakpoints` [(t, v), ...] with t_0 = 0,
    /// extended past the last breakpoint with `final_slope`.
    Piecewise {
        breakpoints: Vec<[f64; 2]>,
        final_slope: f64,
    },
}

/// The derived constants of a weight function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConstants {
    pub lip: f64,
    pub dconst: f64,
    pub kconst: f64,
    pub alpha0: f64,
}

/// A validated weight function with its constants precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
    constants: WeightConstants,
}

impl WeightFunction {
    pub fn identity() -> Self {
        Self {
            kind: WeightKind::Identity,
            constants: WeightConstants {
                lip: 1.0,
                dconst: 1.0,
                kconst: 1.0,
                alpha0: 0.0,
            },
        }
    }

    pub fn shifted() -> Self {
        // sup t/(1+t) = 1 in the limit t -> infinity.
        Self {
            kind: WeightKind::Shifted,
            constants: WeightConstants {
                lip: 1.0,
                dconst: 1.0,
                kconst: 1.0,
                alpha0: 1.0,
            },
        }
    }

    pub fn linear(c: f64) -> Result<Self, WeightError> {
        if !c.is_finite() || c <= 0.0 {
            return Err(WeightError::BadScale(c));
        }
        // K(c*t) = c * (1/c) = 1; set it exactly rather than rounding twice.
        Ok(Self {
            kind: WeightKind::Linear { c },
            constants: WeightConstants {
                lip: c,
                dconst: 1.0 / c,
                kconst: 1.0,
                alpha0: 0.0,
            },
        })
    }

    pub fn piecewise(breakpoints: Vec<[f64; 2]>, final_slope: f64) -> Result<Self, WeightError> {
        if breakpoints.is_empty()
            || breakpoints[0][0] != 0.0
            || breakpoints
                .iter()
                .any(|b| !b[0].is_finite() || !b[1].is_finite())
            || breakpoints.windows(2).any(|w| w[0][0] >= w[1][0])
        {
            return Err(WeightError::BadBreakpoints);
        }
        if !final_slope.is_finite() || final_slope <= 0.0 {
            return Err(WeightError::UnboundedD(final_slope));
        }
        // Positivity: only the value at t = 0 may vanish.
        for (idx, b) in breakpoints.iter().enumerate() {
            let positive_needed = idx > 0;
            if b[1] < 0.0 || (positive_needed && b[1] == 0.0) {
                return Err(WeightError::NonPositive {
                    t: b[0],
                    value: b[1],
                });
            }
        }
        let mut slopes: Vec<f64> = breakpoints
            .windows(2)
            .map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]))
            .collect();
        slopes.push(final_slope);
        let alpha0 = breakpoints[0][1];
        if alpha0 == 0.0 && slopes[0] <= 0.0 {
            return Err(WeightError::NonPositive {
                t: 0.0,
                value: alpha0,
            });
        }
        let lip = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        // Candidates for sup t/alpha(t): every breakpoint with t > 0, the
        // limit t -> 0+ (nonzero only when alpha(0) = 0), and t -> infinity.
        let mut dconst = 1.0 / final_slope;
        if alpha0 == 0.0 {
            dconst = dconst.max(1.0 / slopes[0]);
        }
        for b in breakpoints.iter().skip(1) {
            dconst = dconst.max(b[0] / b[1]);
        }
        let kconst = lip * dconst;
        debug_assert!(kconst >= 1.0 - 1e-12, "K(alpha) >= 1 whenever D is finite");
        Ok(Self {
            kind: WeightKind::Piecewise {
                breakpoints,
                final_slope,
            },
            constants: WeightConstants {
                lip,
                dconst,
                kconst,
                alpha0,
            },
        })
    }

    pub fn from_kind(kind: WeightKind) -> Result<Self, WeightError> {
        match kind {
            WeightKind::Identity => Ok(Self::identity()),
            WeightKind::Shifted => Ok(Self::shifted()),
            WeightKind::Linear { c } => Self::linear(c),
            WeightKind::Piecewise {
                breakpoints,
                final_slope,
            } => Self::piecewise(breakpoints, final_slope),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, WeightParseError> {
        let kind: WeightKind = serde_json::from_str(text)?;
        Ok(Self::from_kind(kind)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.kind).expect("weight serialization")
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Evaluates alpha(t) for t > 0.
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0, "weight functions are defined on (0, inf)");
        match &self.kind {
            WeightKind::Identity => t,
            WeightKind::Shifted => 1.0 + t,
            WeightKind::Linear { c } => c * t,
            WeightKind::Piecewise {
                breakpoints,
                final_slope,
            } => {
                let last = breakpoints[breakpoints.len() - 1];
                if t >= last[0] {
                    return last[1] + final_slope * (t - last[0]);
                }
                let hi = breakpoints.partition_point(|b| b[0] <= t);
                let (lo, hi) = (breakpoints[hi - 1], breakpoints[hi]);
                let frac = (t - lo[0]) / (hi[0] - lo[0]);
                lo[1] + frac * (hi[1] - lo[1])
            }
        }
    }

    pub fn constants(&self) -> WeightConstants {
        self.constants
    }

    /// Lip(alpha), the best Lipschitz constant.
    pub fn lip(&self) -> f64 {
        self.constants.lip
    }

    /// D(alpha) = sup_{t>0} t / alpha(t).
    pub fn dconst(&self) -> f64 {
        self.constants.dconst
    }

    /// K(alpha) = Lip(alpha) * D(alpha), always >= 1.
    pub fn kconst(&self) -> f64 {
        self.constants.kconst
    }

    /// The one-sided limit of alpha at 0.
    pub fn alpha0(&self) -> f64 {
        self.constants.alpha0
    }

    /// D(alpha) * (K(alpha) + 2), the submultiplicativity constant of the
    /// weighted product on Lipschitz functions. The algebra law holds with
    /// constant 1 exactly when this is <= 1, e.g. for alpha(t) = 3t.
    pub fn product_bound(&self) -> f64 {
        match &self.kind {
            // D = 1/c and K = 1, so D(K+2) = 3/c without double rounding.
            WeightKind::Linear { c } => 3.0 / c,
            WeightKind::Identity | WeightKind::Shifted => 3.0,
            WeightKind::Piecewise { .. } => self.constants.dconst * (self.constants.kconst + 2.0),
        }
    }

    /// Bound on the product of the operator norms of the two free-space
    /// isomorphisms induced by the transform, for the free p-space scale
    /// 0 < p <= 1: `1 + 2K` at p = 1 and `(1+K^p)^{1/p} (1+2K^p)^{1/p}`
    /// below.
    pub fn iso_product_bound(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p <= 1.0, "p must lie in (0, 1]");
        let k = self.constants.kconst;
        if p == 1.0 {
            1.0 + 2.0 * k
        } else {
            let kp = k.powf(p);
            ((1.0 + kp) * (1.0 + 2.0 * kp)).powf(1.0 / p)
        }
    }

    /// Infimum of alpha over (0, 1], used for comparing weights with
    /// alpha(0) > 0 against the shifted weight. Exact on the piecewise-linear
    /// family: the infimum is attained at a breakpoint, at alpha(1), or in
    /// the limit at 0.
    pub fn inf_on_unit_interval(&self) -> f64 {
        match &self.kind {
            WeightKind::Identity => 0.0,
            WeightKind::Shifted => 1.0,
            WeightKind::Linear { .. } => 0.0,
            WeightKind::Piecewise { breakpoints, .. } => {
                let mut inf = self.constants.alpha0.min(self.eval(1.0));
                for b in breakpoints.iter().skip(1) {
                    if b[0] <= 1.0 {
                        inf = inf.min(b[1]);
                    }
                }
                inf
            }
        }
    }
}
