//! Machine-readable verification reports.
//!
//! Every record states one checked inequality: `check` is the stable key of
//! the statement, `bound` the allowed maximum (tolerances already folded
//! in), `measured` the observed value, and `slack = bound - measured`. A
//! record passes iff the slack is nonnegative. Wall-clock time is kept out
//! of the serialized form so that identical configurations produce
//! byte-identical files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv serialization failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub instance: String,
    pub bound: f64,
    pub measured: f64,
    pub slack: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// A record passing iff `measured <= bound`.
    pub fn at_most(suite: &str, check: &str, instance: String, bound: f64, measured: f64) -> Self {
        Self {
            suite: suite.to_string(),
            check: check.to_string(),
            instance,
            bound,
            measured,
            slack: bound - measured,
            pass: measured <= bound,
        }
    }

    /// A record passing iff `measured >= bound`.
    pub fn at_least(suite: &str, check: &str, instance: String, bound: f64, measured: f64) -> Self {
        Self {
            suite: suite.to_string(),
            check: check.to_string(),
            instance,
            bound,
            measured,
            slack: measured - bound,
            pass: measured >= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub records: Vec<CheckRecord>,
    /// Smallest slack seen per suite.
    pub worst_slack: BTreeMap<String, f64>,
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl Report {
    pub fn new(suite: String, seed: u64, records: Vec<CheckRecord>) -> Self {
        let mut worst_slack = BTreeMap::new();
        for record in &records {
            let entry = worst_slack
                .entry(record.suite.clone())
                .or_insert(f64::INFINITY);
            *entry = entry.min(record.slack);
        }
        Self {
            suite,
            seed,
            records,
            worst_slack,
            runtime_secs: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat table, one row per record.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record([
            "suite", "check", "instance", "bound", "measured", "slack", "pass",
        ])?;
        for r in &self.records {
            writer.write_record([
                r.suite.as_str(),
                r.check.as_str(),
                r.instance.as_str(),
                &format!("{}", r.bound),
                &format!("{}", r.measured),
                &format!("{}", r.slack),
                if r.pass { "true" } else { "false" },
            ])?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| ReportError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv is utf8"))
    }

    /// One strip of measured/bound ratios per check key, with the pass line
    /// at ratio 1. Records with a nonpositive bound are plotted by slack
    /// around zero instead.
    pub fn to_svg(&self) -> String {
        let mut groups: BTreeMap<&str, Vec<&CheckRecord>> = BTreeMap::new();
        for r in &self.records {
            groups.entry(r.check.as_str()).or_default().push(r);
        }
        let row_height = 28.0;
        let left = 260.0;
        let plot_width = 560.0;
        let height = 60.0 + row_height * groups.len() as f64;
        let width = left + plot_width + 40.0;
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
             viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"monospace\" font-size=\"12\">\n"
        ));
        svg.push_str(&format!(
            "<text x=\"10\" y=\"20\">suite {} seed {} : measured/bound per check (pass line at 1)</text>\n",
            self.suite, self.seed
        ));
        // The x axis spans ratios 0..1.25; the pass line sits at 1.
        let x_of = |ratio: f64| left + plot_width * (ratio.clamp(0.0, 1.25) / 1.25);
        let pass_x = x_of(1.0);
        svg.push_str(&format!(
            "<line x1=\"{pass_x:.1}\" y1=\"32\" x2=\"{pass_x:.1}\" y2=\"{:.1}\" stroke=\"#b00\" stroke-dasharray=\"4 3\"/>\n",
            height - 16.0
        ));
        for (row, (check, records)) in groups.iter().enumerate() {
            let y = 48.0 + row_height * row as f64;
            svg.push_str(&format!(
                "<text x=\"10\" y=\"{:.1}\">{check}</text>\n",
                y + 4.0
            ));
            svg.push_str(&format!(
                "<line x1=\"{left}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ccc\"/>\n",
                left + plot_width
            ));
            for r in records {
                // Slack 0 sits exactly on the pass line; positive slack is
                // left of it. For upper-bound records with a positive bound
                // this is measured/bound.
                let ratio = 1.0 - r.slack / r.bound.abs().max(1e-12);
                let color = if r.pass { "#2a7" } else { "#c22" };
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{y:.1}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.5\"/>\n",
                    x_of(ratio)
                ));
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}
