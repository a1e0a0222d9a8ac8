//! Cross-module checks through the public API.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resgroupoid::atlas::{
    groupoid_chart_forward, groupoid_chart_inverse, model_projector, section_apply, CrossSection,
    GroupoidChart, UnitaryChart,
};
use resgroupoid::grassmann::{
    chart_forward, chart_inverse, restricted_defect, transition, Polarization, Subspace,
};
use resgroupoid::groupoid::{compose, identity_arrow, invert, random_arrow_with};
use resgroupoid::harness::{run_chart_suite, run_groupoid_axiom_suite, SuiteConfig};
use resgroupoid::matcore::{c, complex_gaussian, dist, ToleranceConfig};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn transitivity_within_a_stratum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, k) in [(4, 2), (7, 3), (10, 5)] {
        let src = Subspace::random(n, k, &mut rng);
        let tgt = Subspace::random(n, k, &mut rng);
        let u = random_arrow_with(&src, &tgt, &mut rng).unwrap();
        assert!(dist(u.source_proj(), src.projector()) < 1e-12);
        assert!(dist(u.target_proj(), tgt.projector()) < 1e-12);
        let back = compose(&invert(&u), &u, &tol()).unwrap();
        assert!(dist(back.op(), identity_arrow(&src).op()) < 1e-12);
    }
}

#[test]
fn chart_transition_agrees_with_recharting() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pol = Polarization::new(3, 3).unwrap();
    let w1 = pol.h_plus();
    let a = chart_forward(&w1, &Subspace::random(6, 3, &mut rng), &tol()).unwrap();
    let w2 = chart_inverse(
        &resgroupoid::grassmann::ChartCoordinates::new(
            w1.clone(),
            complex_gaussian(3, 3, &mut rng) * c(0.1),
        )
        .unwrap(),
    );
    {
        let b = transition(&a, &w2, &tol()).unwrap();
        let oracle = chart_forward(&w2, &chart_inverse(&a), &tol()).unwrap();
        assert!(dist(&b.coeff, &oracle.coeff) < 1e-9);
    }
}

#[test]
fn groupoid_chart_at_polarization() {
    let pol = Polarization::new(2, 3).unwrap();
    let hp = pol.h_plus();
    let ch = GroupoidChart::new(
        CrossSection::new(hp.clone()),
        CrossSection::new(hp.clone()),
        UnitaryChart::identity(2),
    )
    .unwrap();
    let coords = groupoid_chart_forward(&ch, &identity_arrow(&hp), &tol()).unwrap();
    assert_eq!(coords.algebra_coord.shape(), (2, 2));
    let u = groupoid_chart_inverse(&ch, &coords, &tol()).unwrap();
    assert!(dist(u.op(), pol.p_plus()) < 1e-15);
    let sigma = section_apply(&ch.source_section, &hp, &tol()).unwrap();
    assert!(
        dist(
            &(&sigma * model_projector(5, 2) * sigma.adjoint()),
            pol.p_plus()
        ) < 1e-15
    );
}

#[test]
fn restricted_defect_block_pythagoras() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pol = Polarization::new(4, 4).unwrap();
    for _ in 0..10 {
        let v = Subspace::random(8, 4, &mut rng);
        let d = restricted_defect(&pol, &v, 2.0).unwrap();
        let diff = v.projector() - pol.p_plus();
        let (pp, _, _, mm) = pol.blocks(&diff);
        let sum = d.offdiag_plus_minus.powi(2)
            + d.offdiag_minus_plus.powi(2)
            + pp.norm_squared()
            + mm.norm_squared();
        assert!((d.hs_defect.powi(2) - sum).abs() < 1e-12);
    }
}

#[test]
fn suites_are_deterministic() {
    let cfg = SuiteConfig {
        trials: 8,
        seed: 99,
        ..SuiteConfig::default()
    };
    let a = serde_json::to_string(&run_groupoid_axiom_suite(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_groupoid_axiom_suite(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let a = serde_json::to_string(&run_chart_suite(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_chart_suite(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = SuiteConfig { seed: 100, ..cfg };
    let c = serde_json::to_string(&run_chart_suite(&other).unwrap()).unwrap();
    assert_ne!(a, c);
}
