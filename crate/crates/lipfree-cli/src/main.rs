//! Command-line front end: validate spaces, compute norms with their dual
//! certificates, emit transformed spaces, run verification suites, and list
//! spectra.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lipfree_cli::config::{AlphaSpec, ExperimentConfig, SuiteKind};
use lipfree_cli::report::Report;
use lipfree_cli::suite::run_suite;
use lipfree_core::algebra::{characters, AlgebraContext};
use lipfree_core::free::{dual_norm, free_norm, FreeVector};
use lipfree_core::metric::PointedMetricSpace;
use lipfree_core::{BoundedSpace, SpaceRef};

#[derive(Parser)]
#[command(
    name = "lipfree",
    about = "Exact free-space norms over finite pointed metric spaces, the bounded transform, and its verification suites",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a space file is a valid pointed metric space.
    Validate {
        /// Path to a space JSON file: {"labels": [...], "dist": [[...], ...]}.
        space: PathBuf,
    },

    /// Exact norm of a mass distribution, with the LP dual certificate.
    Norm {
        space: PathBuf,
        /// Path to a vector JSON file: {"coeff": {"<point>": <real>, ...}}.
        vector: PathBuf,
    },

    /// Emit the bounded transform of a space as a new space file.
    Transform {
        space: PathBuf,
        /// Weight: identity | shifted | linear:<c> | file:<path>.
        #[arg(long, default_value = "identity")]
        alpha: AlphaSpec,
        /// Directory for bounded_space.json; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run a verification suite and write its report.
    Verify {
        /// duality | compbis | theorem_a | algebra | spectrum | ideals |
        /// functor | examples | all.
        #[arg(long)]
        suite: SuiteKind,
        /// Weight override; each suite has its own canonical defaults.
        #[arg(long)]
        alpha: Option<AlphaSpec>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instance count override.
        #[arg(long)]
        trials: Option<usize>,
        /// Maximum space size override.
        #[arg(long)]
        size: Option<usize>,
        /// Equality tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Output directory for report files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Additional report format next to the canonical JSON.
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },

    /// List the characters of the weighted algebra over a space.
    Spectrum {
        space: PathBuf,
        #[arg(long, default_value = "identity")]
        alpha: AlphaSpec,
    },

    /// Re-emit an existing JSON report as CSV or SVG.
    Report {
        report: PathBuf,
        #[arg(long, value_enum)]
        format: OutputFormat,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run() -> Result<i32> {
    match Cli::parse().command {
        Command::Validate { space } => {
            let text = fs::read_to_string(&space)
                .with_context(|| format!("reading {}", space.display()))?;
            match PointedMetricSpace::from_json(&text) {
                Ok(valid) => {
                    println!("valid: {valid}");
                    Ok(0)
                }
                Err(err) => {
                    println!("invalid: {err}");
                    Ok(1)
                }
            }
        }

        Command::Norm { space, vector } => {
            let space = load_space(&space)?;
            let text = fs::read_to_string(&vector)
                .with_context(|| format!("reading {}", vector.display()))?;
            let gamma = FreeVector::from_json(&space, &text)?;
            let primal = free_norm(&gamma);
            let (dual, witness) = dual_norm(&gamma)?;
            println!("free_norm      = {primal}");
            println!("dual_norm      = {dual}");
            println!("gap            = {:e}", (primal - dual).abs());
            println!("witness_lip    = {}", witness.lip_norm());
            println!("support        = {:?}", gamma.support());
            Ok(0)
        }

        Command::Transform { space, alpha, out } => {
            let space = load_space(&space)?;
            let weight = alpha.resolve()?;
            let bounded = BoundedSpace::build(&space, &weight)?;
            let json = bounded.space().to_json();
            let c = weight.constants();
            eprintln!(
                "alpha={alpha} lip={} D={} K={} alpha0={} iso_bound={}",
                c.lip,
                c.dconst,
                c.kconst,
                c.alpha0,
                weight.iso_product_bound(1.0)
            );
            eprintln!(
                "transformed {} points, diameter {}",
                bounded.space().n(),
                bounded.space().diameter()
            );
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)
                        .with_context(|| format!("creating {}", dir.display()))?;
                    let path = dir.join("bounded_space.json");
                    fs::write(&path, json)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("{}", path.display());
                }
                None => println!("{json}"),
            }
            Ok(0)
        }

        Command::Verify {
            suite,
            alpha,
            seed,
            trials,
            size,
            tol,
            out,
            format,
        } => {
            let mut config = ExperimentConfig::new(suite, seed);
            config.alpha = alpha;
            config.trials = trials;
            config.size = size;
            config.tol = tol;
            let report = run_suite(&config)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let json_path = out.join("report.json");
            fs::write(&json_path, report.to_json())
                .with_context(|| format!("writing {}", json_path.display()))?;
            match format {
                OutputFormat::Json => {}
                OutputFormat::Csv => {
                    fs::write(out.join("report.csv"), report.to_csv()?)?;
                }
                OutputFormat::Svg => {
                    fs::write(out.join("report.svg"), report.to_svg())?;
                }
            }
            print_summary(&report);
            eprintln!(
                "wrote {} ({} records, {:.2}s)",
                json_path.display(),
                report.records.len(),
                report.runtime_secs
            );
            Ok(if report.passed() { 0 } else { 1 })
        }

        Command::Spectrum { space, alpha } => {
            let space = load_space(&space)?;
            let weight = alpha.resolve()?;
            let ctx = AlgebraContext::new(&space, &weight);
            let chars = characters(&ctx)?;
            println!(
                "{} characters on {} non-base points (alpha={alpha})",
                chars.len(),
                space.n() - 1
            );
            for ch in &chars {
                println!(
                    "point {:>4} ({}) : f -> f(x) / {}",
                    ch.point(),
                    space.point_name(ch.point()),
                    ctx.zeta(ch.point())
                );
            }
            Ok(0)
        }

        Command::Report {
            report,
            format,
            out,
        } => {
            let text = fs::read_to_string(&report)
                .with_context(|| format!("reading {}", report.display()))?;
            let parsed = Report::from_json(&text)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let path = match format {
                OutputFormat::Json => {
                    let path = out.join("report.json");
                    fs::write(&path, parsed.to_json())?;
                    path
                }
                OutputFormat::Csv => {
                    let path = out.join("report.csv");
                    fs::write(&path, parsed.to_csv()?)?;
                    path
                }
                OutputFormat::Svg => {
                    let path = out.join("report.svg");
                    fs::write(&path, parsed.to_svg())?;
                    path
                }
            };
            println!("{}", path.display());
            Ok(0)
        }
    }
}

fn load_space(path: &Path) -> Result<SpaceRef> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let space = PointedMetricSpace::from_json(&text)
        .with_context(|| format!("validating {}", path.display()))?;
    Ok(Arc::new(space))
}

fn print_summary(report: &Report) {
    for (suite, worst) in &report.worst_slack {
        let records = report.records.iter().filter(|r| &r.suite == suite).count();
        let failed = report
            .records
            .iter()
            .filter(|r| &r.suite == suite && !r.pass)
            .count();
        let status = if failed == 0 { "pass" } else { "FAIL" };
        println!("{status} suite={suite} records={records} worst_slack={worst:e}");
    }
    for failure in report.failures().take(10) {
        println!(
            "FAILED {}::{} on {} : measured {} vs bound {}",
            failure.suite, failure.check, failure.instance, failure.measured, failure.bound
        );
    }
    if report.passed() {
        println!("PASS ({} records)", report.records.len());
    } else {
        println!(
            "FAIL ({} of {} records)",
            report.failures().count(),
            report.records.len()
        );
    }
}
