//! Numerical checks of the symmetry, injectivity, degree and embeddedness
//! properties of a solved surface.
//!
//! Each suite returns a [`VerificationReport`]. Hard checks decide the
//! overall verdict; diagnostics are informational only.

mod degree;
mod embed;
mod geodesic;
mod injective;
mod table;

pub use degree::{degree_diagnostic, preimage_count, DEFAULT_C_VALUES, EXPECTED_DEGREE};
pub use embed::{check_embedded, count_intersections, offset_copies, tri_tri_intersect};
pub use geodesic::{check_gaussian_geodesic, GeodesicProfile};
pub use injective::{check_injectivity, check_injectivity_of, DEFAULT_SEED};
pub use table::{case_diagnostics, check_symmetry_table, TABLE_TOL};

use std::fmt::Write as _;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("check not applicable: {0}")]
    NotApplicable(String),
    #[error("value c = {c} is too close to a boundary value of g ({distance:e})")]
    ContourTooClose { c: String, distance: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: String,
    pub pass: bool,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// Informational checks never fail a suite.
    pub hard: bool,
}

impl CheckResult {
    /// A hard check that passes when `worst <= tolerance`.
    pub fn bound(check: impl Into<String>, worst: f64, tolerance: f64, samples: usize) -> Self {
        Self {
            check: check.into(),
            pass: worst <= tolerance,
            worst_residual: worst,
            tolerance,
            samples,
            hard: true,
        }
    }

    pub fn info(mut self) -> Self {
        self.hard = false;
        self
    }
}

/// Results of one suite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub diagnostics: Vec<(String, String)>,
}

/// Column header of the CSV form.
pub const REPORT_CSV_HEADER: &str = "suite,check,pass,worst_residual,tolerance,samples";

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.diagnostics.push((key.into(), value.into()));
    }

    /// True when every hard check passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.hard).all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "[{}] {}", self.suite, verdict);
        for c in &self.checks {
            let mark = match (c.pass, c.hard) {
                (true, _) => "ok  ",
                (false, true) => "FAIL",
                (false, false) => "warn",
            };
            let _ = writeln!(
                s,
                "  {mark} {:<32} worst={:.3e} tol={:.3e} n={}",
                c.check, c.worst_residual, c.tolerance, c.samples
            );
        }
        for (k, v) in &self.diagnostics {
            let _ = writeln!(s, "  note {k}: {v}");
        }
        s
    }

    /// CSV rows (no header).
    pub fn write_csv_rows<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for c in &self.checks {
            writeln!(
                out,
                "{},{},{},{:.6e},{:.6e},{}",
                self.suite, c.check, c.pass, c.worst_residual, c.tolerance, c.samples
            )?;
        }
        Ok(())
    }
}
