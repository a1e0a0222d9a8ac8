//! Check aggregation and report emission.
//!
//! A trial records one [`Outcome`] per named check. [`TrialReport::aggregate`] folds
//! the trials in index order, so every aggregate is independent of the order in
//! which trials finished.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub(crate) fn serialize_order<S: Serializer>(
    p: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

/// Label used for a Schatten order in tables: `"inf"` or the shortest decimal form.
pub fn order_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Residual(f64),
    /// A postcondition could not be evaluated because an error other than a domain
    /// exit occurred; always a failure.
    Error(String),
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub threshold: f64,
    pub outcome: Outcome,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, Outcome::Residual(r) if r <= self.threshold)
    }

    pub fn failed(&self) -> bool {
        match self.outcome {
            Outcome::Residual(r) => !(r <= self.threshold),
            Outcome::Error(_) => true,
            Outcome::Skipped(_) => false,
        }
    }
}

/// Outcomes of one trial, in evaluation order.
#[derive(Debug, Clone, Default)]
pub struct TrialRecord {
    pub outcomes: Vec<CheckOutcome>,
}

impl TrialRecord {
    pub fn push(&mut self, name: &'static str, threshold: f64, outcome: Outcome) {
        self.outcomes.push(CheckOutcome {
            name,
            threshold,
            outcome,
        });
    }

    pub fn residual(&mut self, name: &'static str, threshold: f64, value: f64) {
        self.push(name, threshold, Outcome::Residual(value));
    }

    /// Records the result of a fallible check. Domain exits become skips; any other
    /// error is a failure.
    pub fn check(&mut self, name: &'static str, threshold: f64, result: Result<f64>) {
        let outcome = match result {
            Ok(r) => Outcome::Residual(r),
            Err(e) if is_domain_exit(&e) => Outcome::Skipped(skip_reason(&e)),
            Err(e) => Outcome::Error(e.to_string()),
        };
        self.push(name, threshold, outcome);
    }

    pub fn skip(&mut self, name: &'static str, threshold: f64, reason: impl Into<String>) {
        self.push(name, threshold, Outcome::Skipped(reason.into()));
    }

    pub fn failed(&self) -> bool {
        self.outcomes.iter().any(CheckOutcome::failed)
    }
}

/// Errors meaning "this sample lies outside a local chart", not "a law is violated".
pub fn is_domain_exit(e: &Error) -> bool {
    matches!(
        e,
        Error::OutsideDomain { .. }
            | Error::OutsideSectionDomain { .. }
            | Error::DomainTooFar(_)
            | Error::BranchCut { .. }
            | Error::OutsideChartDomain { .. }
    )
}

fn skip_reason(e: &Error) -> String {
    match e {
        Error::OutsideDomain { .. } => "outside Grassmann chart domain".into(),
        Error::OutsideSectionDomain { .. } | Error::DomainTooFar(_) => {
            "outside cross-section domain".into()
        }
        Error::BranchCut { .. } => "unitary chart branch cut".into(),
        Error::OutsideChartDomain { component, .. } => {
            format!("outside groupoid chart domain ({component})")
        }
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub threshold: f64,
    pub passes: usize,
    pub failures: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// First error message, for checks that failed by error rather than by residual.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub name: String,
    pub trials: usize,
    /// Trials in which no check failed.
    pub passes: usize,
    /// Trials in which at least one check failed.
    pub failures: usize,
    /// Skipped check evaluations, summed over checks.
    pub skipped: usize,
    pub worst_residual: f64,
    pub checks: Vec<CheckReport>,
    pub skip_reasons: BTreeMap<String, usize>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl TrialReport {
    pub fn aggregate(name: &str, trials: &[TrialRecord], wall_time: Duration) -> Self {
        let mut checks: Vec<CheckReport> = Vec::new();
        let mut sums: Vec<(f64, usize)> = Vec::new();
        let mut skip_reasons = BTreeMap::new();
        for trial in trials {
            for o in &trial.outcomes {
                let idx = match checks.iter().position(|c| c.name == o.name) {
                    Some(i) => i,
                    None => {
                        checks.push(CheckReport {
                            name: o.name.to_string(),
                            threshold: o.threshold,
                            passes: 0,
                            failures: 0,
                            skipped: 0,
                            max_residual: 0.0,
                            mean_residual: 0.0,
                            first_error: None,
                        });
                        sums.push((0.0, 0));
                        checks.len() - 1
                    }
                };
                let c = &mut checks[idx];
                match &o.outcome {
                    Outcome::Residual(r) => {
                        if o.passed() {
                            c.passes += 1;
                        } else {
                            c.failures += 1;
                        }
                        // NaN residuals are failures; keep them visible in the maximum.
                        c.max_residual = if r.is_nan() {
                            f64::NAN
                        } else {
                            c.max_residual.max(*r)
                        };
                        sums[idx].0 += r;
                        sums[idx].1 += 1;
                    }
                    Outcome::Error(msg) => {
                        c.failures += 1;
                        c.first_error.get_or_insert_with(|| msg.clone());
                    }
                    Outcome::Skipped(reason) => {
                        c.skipped += 1;
                        *skip_reasons.entry(reason.clone()).or_insert(0) += 1;
                    }
                }
            }
        }
        for (c, (sum, count)) in checks.iter_mut().zip(&sums) {
            c.mean_residual = if *count > 0 { sum / *count as f64 } else { 0.0 };
        }
        let failures = trials.iter().filter(|t| t.failed()).count();
        Self {
            name: name.to_string(),
            trials: trials.len(),
            passes: trials.len() - failures,
            failures,
            skipped: checks.iter().map(|c| c.skipped).sum(),
            worst_residual: checks.iter().map(|c| c.max_residual).fold(0.0, f64::max),
            checks,
            skip_reasons,
            wall_time,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.failures == 0 && self.checks.iter().all(|c| c.failures == 0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub probe: String,
    pub quantity: String,
    pub order: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub probe: String,
    pub quantity: String,
    /// `divergent`, `constant`, `bounded` or `unclassified`.
    pub behaviour: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub classifications: Vec<Classification>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!(
                "unknown format {other:?}; expected json or csv"
            ))),
        }
    }
}

/// Everything one CLI invocation emits.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: serde_json::Value,
    pub suites: Vec<TrialReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingTable>,
}

impl Report {
    pub fn new(config: serde_json::Value, suites: Vec<TrialReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            config,
            suites,
            scaling: None,
        }
    }

    /// Report for one suite, recording `config` in the document header.
    pub fn for_suite<C: Serialize>(config: &C, suite: TrialReport) -> Result<Self> {
        Ok(Self::new(serde_json::to_value(config)?, vec![suite]))
    }

    pub fn empty() -> Self {
        Self::new(serde_json::Value::Null, Vec::new())
    }

    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(TrialReport::all_passed)
    }
}

/// Renders `report`. CSV has one row per `(suite, check)`; when the report carries a
/// scaling table, the CSV document is that table instead, one row per measurement.
pub fn render_report(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(table) = &report.scaling {
                w.write_record(["n", "probe", "quantity", "order", "value"])?;
                for r in &table.rows {
                    w.write_record([
                        r.n.to_string(),
                        r.probe.clone(),
                        r.quantity.clone(),
                        r.order.clone(),
                        fmt_f64(r.value),
                    ])?;
                }
            } else {
                w.write_record([
                    "suite",
                    "check",
                    "threshold",
                    "passes",
                    "failures",
                    "skipped",
                    "max_residual",
                    "mean_residual",
                ])?;
                for s in &report.suites {
                    for c in &s.checks {
                        w.write_record([
                            s.name.clone(),
                            c.name.clone(),
                            fmt_f64(c.threshold),
                            c.passes.to_string(),
                            c.failures.to_string(),
                            c.skipped.to_string(),
                            fmt_f64(c.max_residual),
                            fmt_f64(c.mean_residual),
                        ])?;
                    }
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// Writes the rendered report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render_report(report, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<TrialRecord> {
        let mut a = TrialRecord::default();
        a.residual("x", 1e-9, 1e-12);
        a.skip("y", 1e-9, "far");
        let mut b = TrialRecord::default();
        b.residual("x", 1e-9, 3e-12);
        b.residual("y", 1e-9, 1e-3);
        vec![a, b]
    }

    #[test]
    fn aggregate_counts() {
        let r = TrialReport::aggregate("s", &sample(), Duration::ZERO);
        assert_eq!((r.trials, r.passes, r.failures, r.skipped), (2, 1, 1, 1));
        let x = r.check("x").unwrap();
        assert_eq!((x.passes, x.failures, x.skipped), (2, 0, 0));
        assert_eq!(x.max_residual, 3e-12);
        assert!((x.mean_residual - 2e-12).abs() < 1e-27);
        let y = r.check("y").unwrap();
        assert_eq!((y.passes, y.failures, y.skipped), (0, 1, 1));
        assert_eq!(r.worst_residual, 1e-3);
        assert_eq!(r.skip_reasons["far"], 1);
        for c in &r.checks {
            assert_eq!(c.passes + c.failures + c.skipped, r.trials);
        }
    }

    #[test]
    fn nan_residual_fails() {
        let mut t = TrialRecord::default();
        t.residual("x", 1.0, f64::NAN);
        assert!(t.failed());
    }

    #[test]
    fn errors_are_failures_and_domain_exits_are_skips() {
        let mut t = TrialRecord::default();
        t.check("a", 1.0, Err(Error::NonConvergence));
        t.check(
            "b",
            1.0,
            Err(Error::BranchCut {
                distance: 0.0,
                margin: 1e-6,
            }),
        );
        let r = TrialReport::aggregate("s", &[t], Duration::ZERO);
        assert_eq!(r.check("a").unwrap().failures, 1);
        assert!(r.check("a").unwrap().first_error.is_some());
        assert_eq!(r.check("b").unwrap().skipped, 1);
    }

    #[test]
    fn empty_documents() {
        let json = render_report(&Report::empty(), Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["suites"].as_array().unwrap().len(), 0);
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        let csv = render_report(&Report::empty(), Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn json_schema_fields() {
        let r = Report::new(
            serde_json::json!({"seed": 7}),
            vec![TrialReport::aggregate("s", &sample(), Duration::ZERO)],
        );
        let v: serde_json::Value =
            serde_json::from_str(&render_report(&r, Format::Json).unwrap()).unwrap();
        let s = &v["suites"][0];
        for key in [
            "name",
            "passes",
            "failures",
            "skipped",
            "worst_residual",
            "checks",
        ] {
            assert!(s.get(key).is_some(), "missing {key}");
        }
        assert!(s.get("wall_time").is_none());
        assert_eq!(s["checks"][0]["name"], "x");
        assert_eq!(v["config"]["seed"], 7);
        let csv = render_report(&r, Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn order_labels() {
        assert_eq!(order_label(f64::INFINITY), "inf");
        assert_eq!(order_label(2.0), "2");
        assert_eq!(order_label(1.5), "1.5");
    }
}
