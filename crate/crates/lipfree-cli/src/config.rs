//! Run configuration: suite selection, weight specification, seeds, and
//! tolerances. A configuration (seed included) fully determines the
//! generated instances and therefore the report.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lipfree_core::weight::WeightParseError;
use lipfree_core::WeightFunction;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown suite {0:?}; expected one of duality, compbis, theorem_a, algebra, spectrum, ideals, functor, examples, all")]
    UnknownSuite(String),
    #[error("bad weight spec {0:?}; expected identity, shifted, linear:<c>, or file:<path>")]
    BadAlphaSpec(String),
    #[error("could not read weight file {path}: {source}")]
    AlphaFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Weight(#[from] WeightParseError),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// The verification suites; `All` runs every one in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    Duality,
    Compbis,
    TheoremA,
    Algebra,
    Spectrum,
    Ideals,
    Functor,
    Examples,
    All,
}

impl SuiteKind {
    pub const SINGLE: [SuiteKind; 8] = [
        SuiteKind::Duality,
        SuiteKind::Compbis,
        SuiteKind::TheoremA,
        SuiteKind::Algebra,
        SuiteKind::Spectrum,
        SuiteKind::Ideals,
        SuiteKind::Functor,
        SuiteKind::Examples,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Duality => "duality",
            SuiteKind::Compbis => "compbis",
            SuiteKind::TheoremA => "theorem_a",
            SuiteKind::Algebra => "algebra",
            SuiteKind::Spectrum => "spectrum",
            SuiteKind::Ideals => "ideals",
            SuiteKind::Functor => "functor",
            SuiteKind::Examples => "examples",
            SuiteKind::All => "all",
        }
    }
}

impl FromStr for SuiteKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteKind::SINGLE
            .iter()
            .copied()
            .chain([SuiteKind::All])
            .find(|k| k.name() == s)
            .ok_or_else(|| ConfigError::UnknownSuite(s.to_string()))
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Weight selection from the command line: `identity`, `shifted`,
/// `linear:<c>`, or `file:<path>` holding a weight JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSpec {
    Identity,
    Shifted,
    Linear(f64),
    File(PathBuf),
}

impl AlphaSpec {
    pub fn resolve(&self) -> Result<WeightFunction, ConfigError> {
        match self {
            AlphaSpec::Identity => Ok(WeightFunction::identity()),
            AlphaSpec::Shifted => Ok(WeightFunction::shifted()),
            AlphaSpec::Linear(c) => WeightFunction::linear(*c)
                .map_err(|e| ConfigError::Weight(WeightParseError::Weight(e))),
            AlphaSpec::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| ConfigError::AlphaFile {
                        path: path.clone(),
                        source,
                    })?;
                Ok(WeightFunction::from_json(&text)?)
            }
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(AlphaSpec::Identity),
            "shifted" => Ok(AlphaSpec::Shifted),
            other => {
                if let Some(c) = other.strip_prefix("linear:") {
                    let c: f64 = c
                        .parse()
                        .map_err(|_| ConfigError::BadAlphaSpec(s.to_string()))?;
                    Ok(AlphaSpec::Linear(c))
                } else if let Some(path) = other.strip_prefix("file:") {
                    Ok(AlphaSpec::File(PathBuf::from(path)))
                } else {
                    Err(ConfigError::BadAlphaSpec(s.to_string()))
                }
            }
        }
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Identity => f.write_str("identity"),
            AlphaSpec::Shifted => f.write_str("shifted"),
            AlphaSpec::Linear(c) => write!(f, "linear:{c}"),
            AlphaSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

/// A fully specified verification run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub suite: SuiteKind,
    /// Overrides the suite's default weight set when present.
    pub alpha: Option<AlphaSpec>,
    pub seed: u64,
    /// Overrides the suite's default instance count.
    pub trials: Option<usize>,
    /// Overrides the suite's default maximum space size.
    pub size: Option<usize>,
    /// Tolerance for equality checks.
    pub tol: f64,
    /// Tolerance for checks that are exact up to machine rounding.
    pub zero_tol: f64,
}

impl ExperimentConfig {
    pub fn new(suite: SuiteKind, seed: u64) -> Self {
        Self {
            suite,
            alpha: None,
            seed,
            trials: None,
            size: None,
            tol: 1e-9,
            zero_tol: 1e-12,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(ConfigError::BadTolerance(self.tol));
        }
        if self.zero_tol <= 0.0 || self.zero_tol.is_nan() {
            return Err(ConfigError::BadTolerance(self.zero_tol));
        }
        Ok(())
    }
}
