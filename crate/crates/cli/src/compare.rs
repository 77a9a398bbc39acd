//! Agreement check between analytic modes and Monte Carlo.

use std::fmt::Write as _;

use ssbc_core::Estimate;

use crate::specfile::{Mode, SweepVar};
use crate::sweep::SweepTable;

pub const DEFAULT_SIGMA: f64 = 3.0;

/// Analytic modes that are expected to match Monte Carlo. The asymptotic
/// forms are limits and are not compared.
pub const COMPARED_MODES: [Mode; 2] = [Mode::Exact, Mode::Approx];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub series: String,
    pub x: f64,
    pub mode: Mode,
    pub analytic: f64,
    pub estimate: Estimate,
    /// `|analytic − mean| / se`, with `se` floored at `1/n`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub sweep: SweepVar,
    pub sigma: f64,
    pub checks: usize,
    pub worst: Option<Check>,
    pub violations: Vec<Check>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let line = |c: &Check| {
            format!(
                "series `{}`, {} = {}, {}: analytic {:.10e}, montecarlo {:.10e} +/- {:.3e}, ratio {:.3}",
                c.series, self.sweep, c.x, c.mode, c.analytic, c.estimate.mean, c.estimate.std_error, c.ratio
            )
        };
        let _ = writeln!(out, "checks: {}", self.checks);
        if let Some(w) = &self.worst {
            let _ = writeln!(out, "max ratio: {:.3} at {}", w.ratio, line(w));
        }
        let _ = writeln!(out, "violations (ratio > {}): {}", self.sigma, self.violations.len());
        for v in &self.violations {
            let _ = writeln!(out, "  {}", line(v));
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

/// Standard error used in the ratio: a degenerate sample (all outcomes equal)
/// has zero spread, so the error is floored at one sample's weight.
pub fn effective_std_error(e: &Estimate) -> f64 {
    e.std_error.max(1.0 / e.samples as f64)
}

/// Compares every exact or approx value against the Monte Carlo estimate of
/// the same row. Returns `None` if the table has no Monte Carlo column or no
/// comparable analytic column.
pub fn compare(table: &SweepTable, sigma: f64) -> Option<CompareReport> {
    let modes: Vec<Mode> = COMPARED_MODES.iter().copied().filter(|m| table.modes.contains(m)).collect();
    if modes.is_empty() || !table.modes.contains(&Mode::MonteCarlo) {
        return None;
    }
    let mut checks = 0;
    let mut worst: Option<Check> = None;
    let mut violations = Vec::new();
    for row in &table.rows {
        let est = row.montecarlo?;
        for &mode in &modes {
            let analytic = row.value(mode)?;
            let ratio = (analytic - est.mean).abs() / effective_std_error(&est);
            let check = Check {
                series: row.series.clone(),
                x: row.x,
                mode,
                analytic,
                estimate: est,
                ratio,
            };
            checks += 1;
            if !(ratio <= sigma) {
                violations.push(check.clone());
            }
            if worst.as_ref().is_none_or(|w| !(ratio <= w.ratio)) {
                worst = Some(check);
            }
        }
    }
    Some(CompareReport {
        sweep: table.sweep,
        sigma,
        checks,
        worst,
        violations,
    })
}
