use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resgroupoid::harness::{
    emit_report, run_chart_suite, run_groupoid_axiom_suite, run_scaling_experiment, run_selftest,
    Format, Probe, Report, ScalingConfig, SuiteConfig,
};
use resgroupoid::matcore::ToleranceConfig;
use resgroupoid::Error;

#[derive(Parser)]
#[command(
    name = "resgroupoid",
    version,
    about = "Verification suites for the groupoid of partial isometries over the restricted Grassmannian"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unit, inverse, associativity and anti-homomorphism laws on random arrows.
    VerifyGroupoid(SuiteArgs),
    /// Grassmann charts, transitions, cross-sections and groupoid charts.
    VerifyCharts(SuiteArgs),
    /// Defect growth of fixed probes as the truncation dimension grows.
    Scaling(ScalingArgs),
    /// Injects known violations and checks that they are detected.
    Selftest(SuiteArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 4)]
    n_plus: usize,
    #[arg(long, default_value_t = 4)]
    n_minus: usize,
    /// Subspace dimension (defaults to n_plus).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Operator-norm equality threshold.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Schatten order for defect reports; `inf` for the operator norm.
    #[arg(long, default_value = "2", value_parser = parse_order)]
    schatten_p: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScalingArgs {
    /// Comma-separated even dimensions, ascending.
    #[arg(long, value_delimiter = ',', default_values_t = resgroupoid::harness::scaling::DEFAULT_DIMS)]
    dims: Vec<usize>,
    #[arg(long, default_value = "all")]
    probe: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "2", value_parser = parse_order)]
    schatten_p: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_order(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|e| format!("invalid Schatten order {s:?}: {e}")),
    }
}

impl SuiteArgs {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            n_plus: self.n_plus,
            n_minus: self.n_minus,
            k: self.k,
            trials: self.trials,
            seed: self.seed,
            tolerances: ToleranceConfig {
                tol_equal: self.tol,
                ..ToleranceConfig::default()
            },
            schatten_order: self.schatten_p,
        }
    }
}

fn run(command: Command) -> Result<(Report, OutputArgs), Error> {
    match command {
        Command::VerifyGroupoid(args) => suite(args, run_groupoid_axiom_suite),
        Command::VerifyCharts(args) => suite(args, run_chart_suite),
        Command::Selftest(args) => suite(args, run_selftest),
        Command::Scaling(args) => {
            let cfg = ScalingConfig {
                dims: args.dims,
                probes: Probe::parse_set(&args.probe)?,
                schatten_order: args.schatten_p,
                seed: args.seed,
            };
            let (report, table) = run_scaling_experiment(&cfg)?;
            let mut out = Report::for_suite(&cfg, report)?;
            out.scaling = Some(table);
            Ok((out, args.output))
        }
    }
}

fn suite(
    args: SuiteArgs,
    runner: fn(&SuiteConfig) -> resgroupoid::Result<resgroupoid::harness::TrialReport>,
) -> Result<(Report, OutputArgs), Error> {
    let cfg = args.config();
    let report = runner(&cfg)?;
    Ok((Report::for_suite(&cfg, report)?, args.output))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, output) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit_report(&report, output.format, output.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
