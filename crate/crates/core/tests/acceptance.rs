//! Acceptance criteria. Prints one line per criterion and exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use resgroupoid::harness::report::CheckReport;
use resgroupoid::harness::{
    run_chart_suite, run_groupoid_axiom_suite, run_scaling_experiment, ScalingConfig, SuiteConfig,
    TrialReport,
};
use resgroupoid::matcore::ToleranceConfig;

struct Verdict {
    ok: bool,
    detail: String,
}

impl Verdict {
    fn new() -> Self {
        Self {
            ok: true,
            detail: String::new(),
        }
    }

    fn require(&mut self, cond: bool, what: impl AsRef<str>) {
        if !cond {
            self.ok = false;
        }
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
        if !cond {
            self.detail.push_str(" [violated]");
        }
    }

    /// `max <= limit` with no failures and at least `min_passes` evaluated trials.
    fn check(&mut self, report: &TrialReport, name: &str, limit: f64, min_passes: usize) {
        match report.check(name) {
            Some(c) => self.check_report(c, limit, min_passes),
            None => self.require(false, format!("{name} missing")),
        }
    }

    fn check_report(&mut self, c: &CheckReport, limit: f64, min_passes: usize) {
        self.require(
            c.failures == 0 && c.max_residual <= limit && c.passes >= min_passes,
            format!(
                "{} max {:.2e} <= {limit:.0e} ({}/{} evaluated)",
                c.name,
                c.max_residual,
                c.passes,
                c.passes + c.skipped
            ),
        );
    }
}

fn suite_config(trials: usize) -> SuiteConfig {
    SuiteConfig {
        n_plus: 8,
        n_minus: 8,
        k: Some(8),
        trials,
        seed: 7,
        tolerances: ToleranceConfig::default(),
        schatten_order: 2.0,
    }
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_resgroupoid"))
        .args(args)
        .output()
        .expect("CLI runs");
    assert!(
        out.status.code().is_some_and(|c| c == 0 || c == 1),
        "CLI configuration error: {out:?}"
    );
    out.stdout
}

fn main() -> ExitCode {
    let mut lines: Vec<(usize, &str, Verdict)> = Vec::new();

    let groupoid = run_groupoid_axiom_suite(&suite_config(200)).expect("groupoid suite runs");
    let mut v = Verdict::new();
    for name in [
        "unit_left",
        "unit_right",
        "inverse",
        "associativity",
        "anti_homomorphism",
    ] {
        v.check(&groupoid, name, 1e-9, 200);
    }
    let secs = groupoid.wall_time.as_secs_f64();
    v.require(secs < 30.0, format!("runtime {secs:.1} s < 30 s"));
    lines.push((1, "groupoid axioms (n+ = n- = 8, k = 8, 200 trials)", v));

    let charts = run_chart_suite(&suite_config(200)).expect("chart suite runs");
    let mut v = Verdict::new();
    v.check(&charts, "coord_oracle", 1e-10, 200);
    v.check(&charts, "projector_invariants", 1e-10, 200);
    lines.push((2, "graph-chart block formula vs frame oracle (5 bases)", v));

    let mut v = Verdict::new();
    v.check(&charts, "transition", 1e-9, 200);
    v.check(&charts, "cocycle", 1e-8, 50);
    v.check(&charts, "transition_derivative", 1e-6, 200);
    lines.push((3, "transition formula, cocycle and derivative", v));

    let mut v = Verdict::new();
    v.check(&charts, "section_property", 1e-9, 200);
    v.check(&charts, "section_base", 1e-12, 200);
    lines.push((4, "cross-section property and base value", v));

    let mut v = Verdict::new();
    v.check(&charts, "groupoid_inverse_forward", 1e-9, 200);
    v.check(&charts, "groupoid_forward_inverse", 1e-9, 200);
    v.check(&charts, "source_target_projection", 1e-9, 200);
    v.check(&charts, "product_image", 1e-9, 200);
    lines.push((5, "groupoid chart roundtrips and product image", v));

    let mut v = Verdict::new();
    v.check(&charts, "inversion_in_chart", 1e-9, 100);
    v.check(&charts, "multiplication_in_chart", 1e-9, 100);
    v.check(&charts, "identity_in_chart", 1e-9, 100);
    v.check(&charts, "identity_algebra_norm", 1e-9, 100);
    lines.push((6, "structure maps in coordinates", v));

    let mut v = Verdict::new();
    v.check(&groupoid, "commutator_block_identity", 1e-12, 200);
    lines.push((7, "commutator block identity (relative)", v));

    let start = Instant::now();
    let (scaling, table) = run_scaling_experiment(&ScalingConfig::default()).expect("scaling runs");
    let secs = start.elapsed().as_secs_f64();
    let mut v = Verdict::new();
    let identity: Vec<(usize, f64)> = table
        .rows
        .iter()
        .filter(|r| r.probe == "identity" && r.quantity == "source_defect" && r.order == "2")
        .map(|r| (r.n, r.value))
        .collect();
    let dims: Vec<usize> = identity.iter().map(|r| r.0).collect();
    v.require(dims == [8, 16, 32, 64, 128, 256], format!("dims {dims:?}"));
    let exact = identity
        .iter()
        .map(|&(n, d)| (d - (n as f64 / 2.0).sqrt()).abs())
        .fold(0.0, f64::max);
    v.require(
        exact <= 1e-12,
        format!("identity |defect - sqrt(n/2)| {exact:.1e} <= 1e-12"),
    );
    v.require(
        identity.windows(2).all(|w| w[1].1 > w[0].1),
        "identity defect strictly increasing",
    );
    v.check(&scaling, "rank1_constant", 1e-12, 1);
    v.check(&scaling, "rank1_closed_form", 1e-12, 6);
    v.require(secs < 120.0, format!("runtime {secs:.1} s < 120 s"));
    lines.push((8, "truncation scaling", v));

    let mut v = Verdict::new();
    v.check(&groupoid, "schatten_monotonicity", 1e-12, 200);
    v.check(&scaling, "monotonicity", 1e-12, 6);
    lines.push((9, "Schatten order monotonicity p in {1, 2, 4, inf}", v));

    let mut v = Verdict::new();
    for args in [
        &[
            "verify-groupoid",
            "--n-plus",
            "4",
            "--n-minus",
            "4",
            "--trials",
            "30",
            "--seed",
            "11",
        ][..],
        &[
            "verify-charts",
            "--n-plus",
            "4",
            "--n-minus",
            "4",
            "--trials",
            "30",
            "--seed",
            "11",
            "--schatten-p",
            "inf",
        ][..],
        &["scaling", "--dims", "8,16,32", "--seed", "11"][..],
        &["selftest", "--trials", "10", "--seed", "11"][..],
    ] {
        let first = cli(args);
        let second = cli(args);
        v.require(
            !first.is_empty() && first == second,
            format!("{} byte-identical ({} bytes)", args[0], first.len()),
        );
    }
    lines.push((10, "CLI determinism", v));

    let mut all = true;
    for (id, title, v) in &lines {
        all &= v.ok;
        println!(
            "criterion {id:>2} {} {title}: {}",
            if v.ok { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
