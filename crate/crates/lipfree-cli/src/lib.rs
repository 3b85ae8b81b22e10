//! Verification harness over `lipfree-core`: run configuration, suite
//! drivers, and report emission. The binary in this crate wires these to a
//! command line.

pub mod config;
pub mod report;
pub mod suite;

pub use config::{AlphaSpec, ConfigError, ExperimentConfig, SuiteKind};
pub use report::{CheckRecord, Report, ReportError};
pub use suite::{run_suite, SuiteError};
