//! Chart suite: Grassmann charts, transitions, cross-sections, groupoid charts and the
//! structure maps in coordinates, each against an independently computed oracle.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::SuiteConfig;
use super::report::{TrialRecord, TrialReport};
use super::rng::{trial_rng, Stream};
use super::sample::{coefficient, coordinates, nearby};
use crate::atlas::{
    groupoid_chart_forward, groupoid_chart_inverse, groupoid_chart_transition, identity_in_chart,
    inversion_in_chart, model_projector, multiplication_in_chart, section_apply,
    transported_operator, CrossSection, GroupoidChart, GroupoidCoordinates, UnitaryChart,
    DEFAULT_BRANCH_MARGIN,
};
use crate::error::{Error, Result};
use crate::grassmann::{
    chart_forward, chart_inverse, transition, transition_derivative, ChartCoordinates, Subspace,
};
use crate::groupoid::{self, compose, identity_arrow, invert, random_arrow_with};
use crate::matcore::{
    c, dist, inverse, op_norm, projector_residual, random_skew_hermitian, random_unitary_with,
    skew_exp, unitary_residual, Matrix, ToleranceConfig,
};

pub const SUITE_NAME: &str = "charts";

/// Number of fixed base subspaces the coordinate oracle cycles through.
pub const ORACLE_BASES: usize = 5;
pub const ORACLE_TOL: f64 = 1e-10;
pub const SECTION_BASE_TOL: f64 = 1e-12;
pub const DERIVATIVE_TOL: f64 = 1e-6;
/// Cocycle residuals compound two transitions; allowed ten times `tol_equal`.
pub const COCYCLE_FACTOR: f64 = 10.0;

/// Coordinate norms used when sampling near a chart centre.
const COORD_SIZE: f64 = 0.6;
const ALGEBRA_RADIUS: f64 = 2.0;
const DERIVATIVE_STEP: f64 = 1e-3;

/// `F (F*F)^{-1} F*` for the graph frame `F = frame(W) + frame(W^perp) A`, through an LU inverse.
pub fn frame_oracle(coords: &ChartCoordinates) -> Result<Matrix> {
    let f = coords.base.frame() + coords.base.perp_frame() * &coords.coeff;
    let gram = inverse(&(f.adjoint() * &f)).ok_or(Error::SingularSpectrum(0.0))?;
    Ok(&f * gram * f.adjoint())
}

/// Central-difference derivative of the transition with one Richardson step:
/// `(4 D(h/2) - D(h)) / 3`.
pub fn richardson_derivative(
    coords: &ChartCoordinates,
    w_to: &Subspace,
    direction: &Matrix,
    h: f64,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    let central = |step: f64| -> Result<Matrix> {
        let shifted = |sign: f64| {
            let moved = ChartCoordinates::new(
                coords.base.clone(),
                &coords.coeff + direction * c(sign * step),
            )?;
            Ok::<_, Error>(transition(&moved, w_to, tol)?.coeff)
        };
        Ok((shifted(1.0)? - shifted(-1.0)?) * c(0.5 / step))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok((fine * c(4.0) - coarse) * c(1.0 / 3.0))
}

pub fn oracle_bases(cfg: &SuiteConfig) -> Vec<Subspace> {
    (0..ORACLE_BASES)
        .map(|i| {
            Subspace::random(
                cfg.n(),
                cfg.k(),
                &mut trial_rng(cfg.seed, Stream::ChartBases, i as u64),
            )
        })
        .collect()
}

fn random_unitary_chart<R: Rng + ?Sized>(
    k: usize,
    rng: &mut R,
    tol: &ToleranceConfig,
) -> Result<UnitaryChart> {
    UnitaryChart::new(random_unitary_with(k, rng), DEFAULT_BRANCH_MARGIN, tol)
}

fn random_coords<R: Rng + ?Sized>(ch: &GroupoidChart, rng: &mut R) -> GroupoidCoordinates {
    GroupoidCoordinates {
        target_coord: coordinates(ch.target_section.base_subspace(), COORD_SIZE, rng),
        source_coord: coordinates(ch.source_section.base_subspace(), COORD_SIZE, rng),
        algebra_coord: random_skew_hermitian(ch.dim(), ALGEBRA_RADIUS, rng),
    }
}

/// `inverse o forward` on an arrow with Haar-random transported unitary; also the check
/// the self-test feeds with corrupted coordinates.
pub(crate) fn roundtrip_from_coords(
    ch: &GroupoidChart,
    coords: &GroupoidCoordinates,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let u = groupoid_chart_inverse(ch, coords, tol)?;
    Ok(groupoid_chart_forward(ch, &u, tol)?.distance(coords))
}

fn grassmann_checks<R: Rng + ?Sized>(
    trial: &mut TrialRecord,
    w: &Subspace,
    cfg: &SuiteConfig,
    rng: &mut R,
) {
    let tol = &cfg.tolerances;
    let eq = tol.tol_equal;
    let (n, k) = (cfg.n(), cfg.k());

    let coords = coordinates(w, 1.0, rng);
    let image = chart_inverse(&coords);
    trial.check(
        "coord_oracle",
        ORACLE_TOL,
        frame_oracle(&coords).map(|p| dist(image.projector(), &p)),
    );
    let trace_defect = (image.projector().trace().re - k as f64).abs();
    trial.residual(
        "projector_invariants",
        ORACLE_TOL,
        projector_residual(image.projector()).max(trace_defect),
    );
    trial.check(
        "chart_reverse_roundtrip",
        eq,
        chart_forward(w, &image, tol).map(|back| dist(&back.coeff, &coords.coeff)),
    );

    let haar = Subspace::random(n, k, rng);
    trial.check(
        "chart_roundtrip",
        eq,
        chart_forward(w, &haar, tol).map(|a| dist(chart_inverse(&a).projector(), haar.projector())),
    );

    let coords = coordinates(w, 0.5, rng);
    let w2 = nearby(w, 0.5, rng);
    let w3 = nearby(w, 0.5, rng);
    trial.check(
        "transition",
        eq,
        (|| {
            let closed = transition(&coords, &w2, tol)?;
            let oracle = chart_forward(&w2, &chart_inverse(&coords), tol)?;
            Ok(dist(&closed.coeff, &oracle.coeff))
        })(),
    );
    trial.check(
        "cocycle",
        COCYCLE_FACTOR * eq,
        (|| {
            let two_step = transition(&transition(&coords, &w2, tol)?, &w3, tol)?;
            let direct = transition(&coords, &w3, tol)?;
            Ok(dist(&two_step.coeff, &direct.coeff))
        })(),
    );
    let direction = coefficient(w, 1.0, rng);
    trial.check(
        "transition_derivative",
        DERIVATIVE_TOL,
        (|| {
            let analytic = transition_derivative(&coords, &w2, &direction, tol)?;
            let numeric = richardson_derivative(&coords, &w2, &direction, DERIVATIVE_STEP, tol)?;
            let scale = op_norm(&analytic);
            Ok(if scale == 0.0 {
                op_norm(&numeric)
            } else {
                dist(&analytic, &numeric) / scale
            })
        })(),
    );

    let sec = CrossSection::new(w.clone());
    let v = nearby(w, 0.8, rng);
    let model = model_projector(n, k);
    trial.check(
        "section_property",
        eq,
        section_apply(&sec, &v, tol).map(|s| dist(&(&s * &model * s.adjoint()), v.projector())),
    );
    trial.check(
        "section_base",
        SECTION_BASE_TOL,
        section_apply(&sec, w, tol).map(|s| dist(&s, sec.base_unitary())),
    );
}

fn groupoid_chart_checks<R: Rng + ?Sized>(
    trial: &mut TrialRecord,
    cfg: &SuiteConfig,
    rng: &mut R,
) -> Result<()> {
    let tol = &cfg.tolerances;
    let eq = tol.tol_equal;
    let (n, k) = (cfg.n(), cfg.k());
    let w_gamma = Subspace::random(n, k, rng);
    let w_beta = Subspace::random(n, k, rng);
    let w_delta = Subspace::random(n, k, rng);
    let (sec_gamma, sec_beta, sec_delta) = (
        CrossSection::new(w_gamma.clone()),
        CrossSection::new(w_beta.clone()),
        CrossSection::new(w_delta.clone()),
    );
    let ch = GroupoidChart::new(
        sec_gamma.clone(),
        sec_beta.clone(),
        random_unitary_chart(k, rng, tol)?,
    )?;
    let coords = random_coords(&ch, rng);

    let arrow = groupoid_chart_inverse(&ch, &coords, tol);
    trial.check(
        "product_image",
        eq,
        arrow
            .as_ref()
            .map_err(clone_error)
            .and_then(|u| Ok(groupoid_chart_forward(&ch, u, tol)?.distance(&coords))),
    );
    trial.check(
        "source_target_projection",
        eq,
        arrow.as_ref().map_err(clone_error).and_then(|u| {
            let a = chart_forward(&w_gamma, &groupoid::target(u, tol)?, tol)?;
            let b = chart_forward(&w_beta, &groupoid::source(u, tol)?, tol)?;
            Ok(dist(&a.coeff, &coords.target_coord.coeff)
                .max(dist(&b.coeff, &coords.source_coord.coeff)))
        }),
    );
    trial.check(
        "transported_block",
        eq,
        arrow.as_ref().map_err(clone_error).and_then(|u| {
            let t = transported_operator(&ch, u, tol)?;
            let block = t.view((0, 0), (k, k)).into_owned();
            let mut off = t.clone();
            off.view_mut((0, 0), (k, k)).fill(c(0.0));
            Ok(op_norm(&off).max(unitary_residual(&block)))
        }),
    );

    let haar_arrow = random_arrow_with(
        &nearby(&w_beta, COORD_SIZE, rng),
        &nearby(&w_gamma, COORD_SIZE, rng),
        rng,
    )?;
    trial.check(
        "groupoid_forward_inverse",
        eq,
        (|| {
            let x = groupoid_chart_forward(&ch, &haar_arrow, tol)?;
            Ok(dist(
                groupoid_chart_inverse(&ch, &x, tol)?.op(),
                haar_arrow.op(),
            ))
        })(),
    );
    trial.check(
        "groupoid_inverse_forward",
        eq,
        roundtrip_from_coords(&ch, &coords, tol),
    );

    let ch_out = ch.swapped(random_unitary_chart(k, rng, tol)?)?;
    trial.check(
        "inversion_in_chart",
        eq,
        arrow.as_ref().map_err(clone_error).and_then(|u| {
            let closed = inversion_in_chart(&ch, &ch_out, &coords, tol)?;
            let oracle = groupoid_chart_forward(&ch_out, &invert(u), tol)?;
            Ok(closed.distance(&oracle))
        }),
    );

    let ch_right = GroupoidChart::new(
        sec_beta.clone(),
        sec_delta.clone(),
        random_unitary_chart(k, rng, tol)?,
    )?;
    let ch_prod = GroupoidChart::new(
        sec_gamma.clone(),
        sec_delta,
        random_unitary_chart(k, rng, tol)?,
    )?;
    let right = GroupoidCoordinates {
        target_coord: coords.source_coord.clone(),
        source_coord: coordinates(&w_delta, COORD_SIZE, rng),
        algebra_coord: random_skew_hermitian(k, ALGEBRA_RADIUS, rng),
    };
    trial.check(
        "multiplication_in_chart",
        eq,
        arrow.as_ref().map_err(clone_error).and_then(|u| {
            let closed = multiplication_in_chart(&ch, &ch_right, &ch_prod, &coords, &right, tol)?;
            let v = groupoid_chart_inverse(&ch_right, &right, tol)?;
            let oracle = groupoid_chart_forward(&ch_prod, &compose(u, &v, tol)?, tol)?;
            Ok(closed.distance(&oracle))
        }),
    );

    let ch_id = GroupoidChart::new(sec_beta.clone(), sec_beta, UnitaryChart::identity(k))?;
    let b = &coords.source_coord;
    let oracle = groupoid_chart_forward(&ch_id, &identity_arrow(&chart_inverse(b)), tol);
    trial.check(
        "identity_in_chart",
        eq,
        oracle
            .as_ref()
            .map_err(clone_error)
            .and_then(|o| Ok(identity_in_chart(&ch_id, b, tol)?.distance(o))),
    );
    trial.check(
        "identity_algebra_norm",
        eq,
        oracle
            .as_ref()
            .map_err(clone_error)
            .map(|o| op_norm(&o.algebra_coord)),
    );

    let nudge = skew_exp(&random_skew_hermitian(k, 0.3, rng), tol)?;
    let ch_to = GroupoidChart::new(
        CrossSection::new(nearby(&w_gamma, 0.3, rng)),
        CrossSection::new(nearby(&w_beta, 0.3, rng)),
        UnitaryChart::new(
            ch.unitary_chart.base_point() * nudge,
            DEFAULT_BRANCH_MARGIN,
            tol,
        )?,
    )?;
    trial.check(
        "groupoid_chart_transition",
        eq,
        arrow.as_ref().map_err(clone_error).and_then(|u| {
            let closed = groupoid_chart_transition(&ch, &ch_to, &coords, tol)?;
            let oracle = groupoid_chart_forward(&ch_to, u, tol)?;
            Ok(closed.distance(&oracle))
        }),
    );
    Ok(())
}

/// Re-raises a shared error for a dependent check. Domain exits keep their kind so the
/// dependent check is skipped for the same reason.
fn clone_error(e: &Error) -> Error {
    match e {
        Error::OutsideDomain { s_min } => Error::OutsideDomain { s_min: *s_min },
        Error::OutsideSectionDomain { distance, radius } => Error::OutsideSectionDomain {
            distance: *distance,
            radius: *radius,
        },
        Error::DomainTooFar(d) => Error::DomainTooFar(*d),
        Error::BranchCut { distance, margin } => Error::BranchCut {
            distance: *distance,
            margin: *margin,
        },
        Error::OutsideChartDomain { component, cause } => Error::OutsideChartDomain {
            component: *component,
            cause: Box::new(clone_error(cause)),
        },
        other => Error::Config(other.to_string()),
    }
}

fn run_trial(cfg: &SuiteConfig, bases: &[Subspace], index: usize) -> TrialRecord {
    let mut trial = TrialRecord::default();
    let mut rng = trial_rng(cfg.seed, Stream::Charts, index as u64);
    grassmann_checks(&mut trial, &bases[index % bases.len()], cfg, &mut rng);
    if let Err(e) = groupoid_chart_checks(&mut trial, cfg, &mut rng) {
        trial.check("groupoid_chart_setup", 0.0, Err(e));
    }
    trial
}

pub fn run_chart_suite(cfg: &SuiteConfig) -> Result<TrialReport> {
    cfg.validate()?;
    if cfg.k() == cfg.n() {
        return Err(Error::Config(
            "chart suite needs k < n_plus + n_minus".into(),
        ));
    }
    let start = Instant::now();
    let bases = oracle_bases(cfg);
    let trials: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, &bases, i))
        .collect();
    Ok(TrialReport::aggregate(SUITE_NAME, &trials, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::from_real_rows;

    #[test]
    fn default_config_passes() {
        let cfg = SuiteConfig {
            trials: 10,
            ..SuiteConfig::default()
        };
        let r = run_chart_suite(&cfg).unwrap();
        assert_eq!(r.failures, 0, "{r:#?}");
        let d = r.check("transition_derivative").unwrap();
        assert!(d.max_residual <= 1e-6);
    }

    #[test]
    fn other_stratum_runs() {
        let cfg = SuiteConfig {
            n_plus: 3,
            n_minus: 4,
            k: Some(2),
            trials: 5,
            ..SuiteConfig::default()
        };
        let r = run_chart_suite(&cfg).unwrap();
        assert_eq!(r.failures, 0, "{r:#?}");
    }

    #[test]
    fn frame_oracle_scalar_case() {
        // A = [a] at H+ in C^2: (1 + a^2)^{-1} [[1, a], [a, a^2]].
        let base = Subspace::coordinate(2, [0]);
        let a = 0.75;
        let coords = ChartCoordinates::new(base, Matrix::from_element(1, 1, c(a))).unwrap();
        let want = from_real_rows(2, 2, &[1.0, a, a, a * a]) * c(1.0 / (1.0 + a * a));
        assert!(dist(&frame_oracle(&coords).unwrap(), &want) < 1e-15);
    }

    #[test]
    fn richardson_matches_linear_map() {
        // At equal bases the transition is the identity, so every difference quotient is exact.
        let base = Subspace::coordinate(4, [0, 1]);
        let mut rng = trial_rng(1, Stream::Charts, 0);
        let coords = coordinates(&base, 0.5, &mut rng);
        let dir = coefficient(&base, 1.0, &mut rng);
        let d =
            richardson_derivative(&coords, &base, &dir, 1e-3, &ToleranceConfig::default()).unwrap();
        assert!(dist(&d, &dir) < 1e-10);
    }

    #[test]
    fn full_space_rejected() {
        let cfg = SuiteConfig {
            n_plus: 2,
            n_minus: 0,
            trials: 1,
            ..SuiteConfig::default()
        };
        assert!(matches!(run_chart_suite(&cfg), Err(Error::Config(_))));
    }
}
