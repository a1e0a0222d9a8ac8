//! Verification harness: property suites, the scaling experiment and report output.

pub mod axioms;
pub mod charts;
pub mod config;
pub mod report;
pub mod rng;
pub mod sample;
pub mod scaling;
pub mod selftest;

pub use axioms::run_groupoid_axiom_suite;
pub use charts::run_chart_suite;
pub use config::SuiteConfig;
pub use report::{emit_report, render_report, Format, Report, TrialReport};
pub use scaling::{run_scaling_experiment, Probe, ScalingConfig};
pub use selftest::run_selftest;
