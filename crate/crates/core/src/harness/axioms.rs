//! Groupoid axiom suite: random composable triples of partial isometries.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::SuiteConfig;
use super::report::{TrialRecord, TrialReport};
use super::rng::{trial_rng, Stream};
use crate::error::{Error, Result};
use crate::grassmann::{restricted_defect, Polarization, Subspace};
use crate::groupoid::{
    self, commutator, compose, identity_arrow, invert, offdiagonal_norms, random_arrow_with,
    PartialIsometry,
};
use crate::matcore::{
    dist, op_norm, schatten_from_values, singular_values, Matrix, ToleranceConfig,
};

pub const SUITE_NAME: &str = "groupoid_axioms";

/// Absolute slack for norm-ordering comparisons.
pub const MONOTONICITY_SLACK: f64 = 1e-12;
/// Relative tolerance of the commutator block identity.
pub const BLOCK_IDENTITY_TOL: f64 = 1e-12;

/// Orders checked by the Schatten monotonicity chain, in addition to the configured one.
pub const CHAIN_ORDERS: [f64; 4] = [1.0, 2.0, 4.0, f64::INFINITY];

/// `max(||uu*u - u||, ||u*uu* - u*||)`.
pub fn isometry_residual(op: &Matrix) -> f64 {
    let adj = op.adjoint();
    dist(&(op * &adj * op), op).max(dist(&(&adj * op * &adj), &adj))
}

/// Largest violation of `||M||_q <= ||M||_p` for `p < q` over the given orders.
pub fn monotonicity_violation(m: &Matrix, orders: &[f64]) -> Result<f64> {
    let s = singular_values(m)?;
    let mut sorted: Vec<f64> = orders.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let norms = sorted
        .iter()
        .map(|&p| schatten_from_values(&s, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(norms
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .fold(0.0, f64::max))
}

/// Relative residual of `||[u,P+]||_2^2 = ||u_{+-}||_2^2 + ||u_{-+}||_2^2`.
pub fn block_identity_residual(pol: &Polarization, u: &PartialIsometry) -> Result<f64> {
    let lhs = commutator(pol, u)?.norm_squared();
    let (pm, mp) = offdiagonal_norms(pol, u)?;
    let rhs = pm * pm + mp * mp;
    Ok((lhs - rhs).abs() / lhs.max(rhs).max(f64::MIN_POSITIVE))
}

struct Triple {
    objects: [Subspace; 4],
    /// `g: V1 -> V0`, `h: V2 -> V1`, `l: V3 -> V2`.
    g: PartialIsometry,
    h: PartialIsometry,
    l: PartialIsometry,
}

fn sample_triple<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Triple> {
    let objects = [(); 4].map(|_| Subspace::random(n, k, rng));
    let g = random_arrow_with(&objects[1], &objects[0], rng)?;
    let h = random_arrow_with(&objects[2], &objects[1], rng)?;
    let l = random_arrow_with(&objects[3], &objects[2], rng)?;
    Ok(Triple { objects, g, h, l })
}

fn arrow_dist(a: &PartialIsometry, b: &PartialIsometry) -> f64 {
    dist(a.op(), b.op())
}

pub(crate) fn partial_isometry_check(
    trial: &mut TrialRecord,
    arrows: &[&PartialIsometry],
    tol: &ToleranceConfig,
) {
    let worst = arrows
        .iter()
        .map(|u| isometry_residual(u.op()))
        .fold(0.0, f64::max);
    trial.residual("partial_isometry", tol.tol_equal, worst);
}

fn run_trial(cfg: &SuiteConfig, pol: &Polarization, index: usize) -> TrialRecord {
    let tol = &cfg.tolerances;
    let eq = tol.tol_equal;
    let mut trial = TrialRecord::default();
    let mut rng = trial_rng(cfg.seed, Stream::Groupoid, index as u64);
    let Triple { objects, g, h, l } = match sample_triple(cfg.n(), cfg.k(), &mut rng) {
        Ok(t) => t,
        Err(e) => {
            trial.check("sampling", 0.0, Err(e));
            return trial;
        }
    };

    partial_isometry_check(&mut trial, &[&g, &h, &l], tol);

    trial.check(
        "source_target",
        eq,
        (|| {
            let mut worst: f64 = 0.0;
            for (u, src, tgt) in [(&g, 1, 0), (&h, 2, 1), (&l, 3, 2)] {
                worst = worst.max(dist(
                    groupoid::source(u, tol)?.projector(),
                    objects[src].projector(),
                ));
                worst = worst.max(dist(
                    groupoid::target(u, tol)?.projector(),
                    objects[tgt].projector(),
                ));
            }
            Ok(worst)
        })(),
    );

    trial.check(
        "unit_left",
        eq,
        (|| {
            let t = groupoid::target(&g, tol)?;
            Ok(arrow_dist(&compose(&identity_arrow(&t), &g, tol)?, &g))
        })(),
    );
    trial.check(
        "unit_right",
        eq,
        (|| {
            let s = groupoid::source(&g, tol)?;
            Ok(arrow_dist(&compose(&g, &identity_arrow(&s), tol)?, &g))
        })(),
    );
    trial.check(
        "inverse",
        eq,
        (|| {
            let gi = invert(&g);
            let left = compose(&g, &gi, tol)?;
            let right = compose(&gi, &g, tol)?;
            Ok(dist(left.op(), objects[0].projector())
                .max(dist(right.op(), objects[1].projector())))
        })(),
    );
    trial.check(
        "associativity",
        eq,
        (|| {
            let lhs = compose(&compose(&g, &h, tol)?, &l, tol)?;
            let rhs = compose(&g, &compose(&h, &l, tol)?, tol)?;
            Ok(arrow_dist(&lhs, &rhs))
        })(),
    );
    trial.check(
        "anti_homomorphism",
        eq,
        (|| {
            let lhs = invert(&compose(&g, &h, tol)?);
            let rhs = compose(&invert(&h), &invert(&g), tol)?;
            Ok(arrow_dist(&lhs, &rhs))
        })(),
    );
    trial.check(
        "composition_closure",
        eq,
        (|| {
            let gh = compose(&g, &h, tol)?;
            Ok(isometry_residual(gh.op())
                .max(dist(gh.source_proj(), objects[2].projector()))
                .max(dist(gh.target_proj(), objects[0].projector())))
        })(),
    );
    // s(g) = V1 and t(l) = V3 are independent random subspaces; the product must be refused.
    let rejected = match compose(&g, &l, tol) {
        Err(Error::NotComposable { mismatch }) => mismatch > eq,
        _ => false,
    };
    trial.residual(
        "non_composable_rejected",
        0.5,
        if rejected { 0.0 } else { 1.0 },
    );

    trial.check(
        "commutator_block_identity",
        BLOCK_IDENTITY_TOL,
        [&g, &h, &l]
            .iter()
            .map(|u| block_identity_residual(pol, u))
            .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r))),
    );

    trial.check(
        "schatten_monotonicity",
        MONOTONICITY_SLACK,
        (|| {
            let mut orders = CHAIN_ORDERS.to_vec();
            orders.push(cfg.schatten_order);
            let mut worst: f64 = 0.0;
            for u in [&g, &h, &l] {
                worst = worst.max(monotonicity_violation(&commutator(pol, u)?, &orders)?);
            }
            for v in &objects {
                worst = worst.max(monotonicity_violation(
                    &(v.projector() - pol.p_plus()),
                    &orders,
                )?);
                // The configured-order report must sit inside the chain as well.
                let d = restricted_defect(pol, v, cfg.schatten_order)?;
                let inf = op_norm(&(v.projector() - pol.p_plus()));
                let bracket = if cfg.schatten_order >= 2.0 {
                    (d.p_defect - d.hs_defect).max(inf - d.p_defect)
                } else {
                    d.hs_defect - d.p_defect
                };
                worst = worst.max(bracket.max(0.0));
            }
            Ok(worst)
        })(),
    );
    trial
}

pub fn run_groupoid_axiom_suite(cfg: &SuiteConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let start = Instant::now();
    let pol = Polarization::new(cfg.n_plus, cfg.n_minus)?;
    let trials: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, &pol, i))
        .collect();
    Ok(TrialReport::aggregate(SUITE_NAME, &trials, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{c, from_real_rows};

    #[test]
    fn default_config_passes() {
        let cfg = SuiteConfig {
            trials: 20,
            ..SuiteConfig::default()
        };
        let r = run_groupoid_axiom_suite(&cfg).unwrap();
        assert_eq!(r.failures, 0, "{r:#?}");
        assert!(r.worst_residual <= 1e-9);
        for c in &r.checks {
            assert_eq!(c.passes + c.failures + c.skipped, cfg.trials);
        }
    }

    #[test]
    fn smallest_instance_runs() {
        let cfg = SuiteConfig {
            n_plus: 1,
            n_minus: 1,
            trials: 1,
            ..SuiteConfig::default()
        };
        let r = run_groupoid_axiom_suite(&cfg).unwrap();
        assert_eq!(r.trials, 1);
        assert_eq!(r.failures, 0, "{r:#?}");
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = SuiteConfig {
            trials: 0,
            ..SuiteConfig::default()
        };
        assert!(matches!(
            run_groupoid_axiom_suite(&cfg),
            Err(Error::Config(_))
        ));
        let cfg = SuiteConfig {
            k: Some(9),
            ..SuiteConfig::default()
        };
        assert!(matches!(
            run_groupoid_axiom_suite(&cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn scaled_arrow_is_detected() {
        let u = from_real_rows(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        assert!(isometry_residual(&u) < 1e-15);
        // (1.01^3 - 1.01) ||u|| by hand.
        let r = isometry_residual(&(u * c(1.01)));
        assert!((r - (1.01f64.powi(3) - 1.01)).abs() < 1e-14);
    }

    #[test]
    fn monotonicity_of_diagonal() {
        let m = crate::matcore::real_diag(&[3.0, 4.0]);
        assert_eq!(monotonicity_violation(&m, &CHAIN_ORDERS).unwrap(), 0.0);
    }
}
