//! Check reports and their text, JSON and CSV renderings.

use std::fmt::{self, Write as _};
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    OutOfRegime,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    /// Keeps a failure, but turns a pass resting on a poor fit into
    /// `OutOfRegime`.
    pub fn require_fit(self, r_squared: f64, min: f64) -> Self {
        match self {
            Self::Pass if !(r_squared >= min) => Self::OutOfRegime,
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::OutOfRegime => "OUT_OF_REGIME",
        })
    }
}

/// One estimate set against its prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    /// The estimate being tested, in words.
    pub reference: String,
    pub predicted: f64,
    pub measured: f64,
    /// Confidence interval around `measured` when one is available.
    pub ci: Option<[f64; 2]>,
    /// Allowed `|measured - predicted|`, or the threshold the measurement
    /// is compared with (see `note`).
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    /// Hash of the parameters and seed that produced the report.
    pub fingerprint: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn text_line(&self) -> String {
        let mut s = format!(
            "[{}] {}: measured {:.6} vs predicted {:.6} (tol {})",
            self.verdict, self.check, self.measured, self.predicted, self.tolerance
        );
        if let Some([lo, hi]) = self.ci {
            let _ = write!(s, " ci [{lo:.6}, {hi:.6}]");
        }
        if !self.note.is_empty() {
            let _ = write!(s, "; {}", self.note);
        }
        s
    }
}

/// Data behind one regression: `x`, observed `y` and the fitted line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub check: String,
    pub x: f64,
    pub y: f64,
    pub fitted: f64,
}

pub fn fit_rows(check: &str, x: &[f64], y: &[f64], intercept: f64, slope: f64) -> Vec<FitRow> {
    x.iter()
        .zip(y)
        .map(|(&x, &y)| FitRow {
            check: check.to_owned(),
            x,
            y,
            fitted: intercept + slope * x,
        })
        .collect()
}

/// Everything one group of checks produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub reports: Vec<CheckReport>,
    #[serde(skip)]
    pub fits: Vec<FitRow>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(CheckReport::passed)
    }

    pub fn extend(&mut self, other: Outcome) {
        self.reports.extend(other.reports);
        self.fits.extend(other.fits);
    }

    pub fn push(&mut self, report: CheckReport) {
        self.reports.push(report);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub reports: Vec<CheckReport>,
    #[serde(skip)]
    pub fits: Vec<FitRow>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(CheckReport::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let failed = self.reports.iter().filter(|r| !r.passed()).count();
        let mut s = format!(
            "suite {} (seed {}): {} checks, {} not passing\n",
            self.suite,
            self.seed,
            self.reports.len(),
            failed
        );
        for r in &self.reports {
            s.push_str(&r.text_line());
            s.push('\n');
        }
        s
    }

    pub fn write_fit_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.fits {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
