//! Command-line verification suites for framekit.

pub mod catalogue;
pub mod report;
pub mod suites;

use std::path::Path;

use framekit::exact::{format_rational, integer, Rational};
use framekit::frames::optimal_bounds;
use framekit::gabor_continuous::{collapse_report, CollapseReport, GaborError};
use framekit::transforms::{Tolerances, Verdict};
use serde::Serialize;

pub use report::{CheckRecord, Report, SCHEMA};
pub use suites::{run, SuiteConfig};

/// Exit status for a run where every check passed.
pub const EXIT_PASS: u8 = 0;
/// Exit status when some check failed.
pub const EXIT_VIOLATION: u8 = 1;
/// Exit status for malformed input or configuration.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown suite {0:?}; run `framekit list` for the catalogue")]
    UnknownSuite(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        EXIT_INPUT
    }
}

/// Splits `--tol.<name>=<value>` and `--tol.<name> <value>` out of the
/// argument list, applying them to `tol`; the remaining arguments are
/// returned for the regular parser.
pub fn extract_tolerances(args: Vec<String>, tol: &mut Tolerances) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(spec) = arg.strip_prefix("--tol.") else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Input(format!("--tol.{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Input(format!("--tol.{name}: {value:?} is not a number")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(CliError::Input(format!("--tol.{name} must be finite and non-negative")));
        }
        if !tol.set(&name, value) {
            return Err(CliError::Input(format!(
                "unknown tolerance {name:?}; known: {}",
                Tolerances::NAMES.join(", ")
            )));
        }
    }
    Ok(rest)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsOutput {
    pub schema: &'static str,
    #[serde(rename = "A")]
    pub lower: f64,
    #[serde(rename = "B")]
    pub upper: f64,
    pub is_frame: bool,
    pub is_riesz_basis: bool,
}

/// Optimal bounds of the frame stored at `path`.
pub fn bounds(path: &Path, tol: &Tolerances) -> Result<BoundsOutput, CliError> {
    let f = suites::load_frame(path)?;
    let d = optimal_bounds(&f, tol.rank).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(BoundsOutput {
        schema: SCHEMA,
        lower: d.lower_bound,
        upper: d.upper_bound,
        is_frame: d.is_frame,
        is_riesz_basis: d.is_riesz_basis,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessOutput {
    pub schema: &'static str,
    pub n: u32,
    pub x: String,
    pub y: String,
    pub c_phase: String,
    pub integer_product: bool,
    pub norm_sq: String,
    pub numerator: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerator_exact: Option<String>,
    pub two_x: String,
    pub ratio: f64,
    pub expected_ratio: f64,
    pub checks: std::collections::BTreeMap<String, bool>,
    pub verdict: Verdict,
}

/// Collapse data for the witness `f_n`. Without an integer `xy` the values
/// are reported and the verdict fails, since the collapse is not claimed.
pub fn witness(n: u32, x: &Rational, y: &Rational, c_phase: &Rational) -> Result<WitnessOutput, CliError> {
    let (report, holds): (CollapseReport, bool) = match collapse_report(n, x, y, c_phase) {
        Ok(r) => (r, true),
        Err(GaborError::HypothesisFailed { contrast, .. }) => (*contrast, false),
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let row = report.rows.last().expect("n ≥ 1 rows").clone();
    let verdict = Verdict::from_bool(holds && report.passed);
    Ok(WitnessOutput {
        schema: SCHEMA,
        n,
        x: report.x,
        y: report.y,
        c_phase: report.c_phase,
        integer_product: report.integer_product,
        norm_sq: row.norm_sq,
        numerator: row.numerator,
        numerator_exact: row.numerator_exact,
        two_x: format_rational(&(integer(2) * num_traits::Signed::abs(x))),
        ratio: row.ratio,
        expected_ratio: row.expected_ratio,
        checks: report.checks,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use framekit::exact::rational;

    fn args(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tolerance_flags_are_extracted() {
        let mut tol = Tolerances::default();
        let rest = extract_tolerances(
            args(&["framekit", "verify", "--tol.operator=1e-8", "--suite", "riesz", "--tol.rank", "1e-6"]),
            &mut tol,
        )
        .unwrap();
        assert_eq!(rest, args(&["framekit", "verify", "--suite", "riesz"]));
        assert_eq!(tol.operator, 1e-8);
        assert_eq!(tol.rank, 1e-6);
        assert!(extract_tolerances(args(&["--tol.nope=1"]), &mut tol).is_err());
        assert!(extract_tolerances(args(&["--tol.rank=x"]), &mut tol).is_err());
        assert!(extract_tolerances(args(&["--tol.rank"]), &mut tol).is_err());
        assert!(extract_tolerances(args(&["--tol.rank=-1"]), &mut tol).is_err());
    }

    #[test]
    fn witness_output() {
        let w = witness(16, &rational(1, 2), &integer(2), &rational(1, 7)).unwrap();
        assert_eq!(w.numerator_exact.as_deref(), Some("1/1"));
        assert_eq!(w.ratio, 0.125);
        assert!(w.verdict.passed());
        let c = witness(4, &integer(1), &rational(1, 2), &integer(0)).unwrap();
        assert!(!c.verdict.passed());
        assert_ne!(c.numerator, 2.0);
        assert!(witness(0, &integer(1), &integer(1), &integer(0)).is_err());
    }
}
