//! Detector sanity: inject known violations and confirm the suite checks flag them.

use std::time::Instant;

use rayon::prelude::*;

use super::axioms::partial_isometry_check;
use super::charts::roundtrip_from_coords;
use super::config::SuiteConfig;
use super::report::{TrialRecord, TrialReport};
use super::rng::{trial_rng, Stream};
use super::sample::coordinates;
use crate::atlas::{
    CrossSection, GroupoidChart, GroupoidCoordinates, UnitaryChart, DEFAULT_BRANCH_MARGIN,
};
use crate::error::Result;
use crate::grassmann::Subspace;
use crate::groupoid::{random_arrow_with, PartialIsometry};
use crate::matcore::{c, complex_gaussian, random_skew_hermitian, random_unitary_with, Matrix};

pub const SUITE_NAME: &str = "selftest";
/// Factor applied to an arrow to break `uu*u = u`.
pub const ARROW_SCALE: f64 = 1.01;
/// Size of the Hermitian part added to a skew-Hermitian coordinate.
pub const HERMITIAN_PERTURBATION: f64 = 1e-2;

fn run_trial(cfg: &SuiteConfig, index: usize) -> Result<TrialRecord> {
    let tol = &cfg.tolerances;
    let (n, k) = (cfg.n(), cfg.k());
    let mut rng = trial_rng(cfg.seed, Stream::SelfTest, index as u64);
    let mut trial = TrialRecord::default();

    let src = Subspace::random(n, k, &mut rng);
    let tgt = Subspace::random(n, k, &mut rng);
    let u = random_arrow_with(&src, &tgt, &mut rng)?;
    let corrupted = PartialIsometry::new_unchecked(u.op() * c(ARROW_SCALE));
    let mut probe = TrialRecord::default();
    partial_isometry_check(&mut probe, &[&corrupted], tol);
    trial.residual(
        "scaled_arrow_detected",
        0.5,
        if probe.failed() { 0.0 } else { 1.0 },
    );
    let mut control = TrialRecord::default();
    partial_isometry_check(&mut control, &[&u], tol);
    trial.residual(
        "clean_arrow_accepted",
        0.5,
        if control.failed() { 1.0 } else { 0.0 },
    );

    let ch = GroupoidChart::new(
        CrossSection::new(Subspace::random(n, k, &mut rng)),
        CrossSection::new(Subspace::random(n, k, &mut rng)),
        UnitaryChart::new(random_unitary_with(k, &mut rng), DEFAULT_BRANCH_MARGIN, tol)?,
    )?;
    let mut coords = GroupoidCoordinates {
        target_coord: coordinates(ch.target_section.base_subspace(), 0.6, &mut rng),
        source_coord: coordinates(ch.source_section.base_subspace(), 0.6, &mut rng),
        algebra_coord: random_skew_hermitian(k, 1.0, &mut rng),
    };
    let g = complex_gaussian(k, k, &mut rng);
    let herm: Matrix = (&g + g.adjoint()) * c(0.5);
    let herm_norm = crate::matcore::op_norm(&herm).max(f64::MIN_POSITIVE);
    coords.algebra_coord += herm * c(HERMITIAN_PERTURBATION / herm_norm);
    let mut probe = TrialRecord::default();
    probe.check(
        "groupoid_inverse_forward",
        tol.tol_equal,
        roundtrip_from_coords(&ch, &coords, tol),
    );
    trial.residual(
        "non_skew_detected",
        0.5,
        if probe.failed() { 0.0 } else { 1.0 },
    );
    Ok(trial)
}

/// Every trial injects one scaled arrow and one non-skew algebra coordinate; the report
/// passes only when all injections are detected and the clean control is accepted.
pub fn run_selftest(cfg: &SuiteConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let start = Instant::now();
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            run_trial(cfg, i).unwrap_or_else(|e| {
                let mut t = TrialRecord::default();
                t.check("setup", 0.0, Err(e));
                t
            })
        })
        .collect::<Vec<_>>();
    Ok(TrialReport::aggregate(SUITE_NAME, &trials, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_injections_detected() {
        let cfg = SuiteConfig {
            trials: 10,
            ..SuiteConfig::default()
        };
        let r = run_selftest(&cfg).unwrap();
        assert!(r.all_passed(), "{r:#?}");
        assert_eq!(r.check("scaled_arrow_detected").unwrap().passes, 10);
        assert_eq!(r.check("non_skew_detected").unwrap().passes, 10);
    }
}
