//! Structured verification reports.
//!
//! Every CLI command and acceptance criterion reduces to a list of
//! [`Check`]s: a computed number, a reference, and a tolerance. The pass
//! rule is uniform — relative error against a nonzero reference, absolute
//! against zero — so a report is reproducible bit-for-bit from the same
//! inputs and seed (wall time excepted).

use crate::quad::QuadStats;
use serde::Serialize;

/// One named comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub abs_error: f64,
    /// Relative to `reference`; equals `abs_error` when the reference is 0.
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Compares `computed` to `reference`: passes when the relative error is
    /// within `tolerance` (absolute error when the reference is zero).
    pub fn against(name: impl Into<String>, computed: f64, reference: f64, tolerance: f64) -> Self {
        let abs_error = (computed - reference).abs();
        let rel_error = if reference == 0.0 {
            abs_error
        } else {
            abs_error / reference.abs()
        };
        let pass = rel_error.is_finite() && rel_error <= tolerance;
        Check {
            name: name.into(),
            computed,
            reference,
            abs_error,
            rel_error,
            tolerance,
            pass,
        }
    }

    /// Asserts a precomputed error measure is within `tolerance` (for checks
    /// whose natural statement is "residual below bound").
    pub fn residual(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            computed: residual,
            reference: 0.0,
            abs_error: residual.abs(),
            rel_error: residual.abs(),
            tolerance,
            pass: residual.is_finite() && residual.abs() <= tolerance,
        }
    }

    /// Asserts `value >= bound - slack` (positivity-style checks). The check
    /// records `value` as computed and `bound` as reference.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, slack: f64) -> Self {
        Check {
            name: name.into(),
            computed: value,
            reference: bound,
            abs_error: (bound - value).max(0.0),
            rel_error: (bound - value).max(0.0),
            tolerance: slack,
            pass: value.is_finite() && value >= bound - slack,
        }
    }
}

/// Full result of one verification command.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Report format version.
    pub schema: u32,
    /// The command that produced the report.
    pub command: String,
    /// Echo of the numeric parameters (including the seed).
    pub params: serde_json::Value,
    pub checks: Vec<Check>,
    /// Conjunction of the individual checks.
    pub passed: bool,
    /// Wall-clock time; excluded from reproducibility comparisons.
    pub wall_time_ms: f64,
    /// Quadrature work attributed to this command.
    pub quadrature: QuadStats,
}

impl VerificationReport {
    pub const SCHEMA: u32 = 1;

    pub fn new(
        command: impl Into<String>,
        params: serde_json::Value,
        checks: Vec<Check>,
        wall_time_ms: f64,
        quadrature: QuadStats,
    ) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.pass);
        VerificationReport {
            schema: Self::SCHEMA,
            command: command.into(),
            params,
            checks,
            passed,
            wall_time_ms,
            quadrature,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Flat CSV: one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,computed,reference,abs_error,rel_error,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
                c.name, c.computed, c.reference, c.abs_error, c.rel_error, c.tolerance, c.pass
            ));
        }
        out
    }
}
