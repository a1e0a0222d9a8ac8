//! Truncation-scaling experiment: defects of fixed probes as the truncation grows.
//!
//! Each dimension `n` uses `n+ = n- = n/2`. Probes:
//! - `identity`: the identity arrow, whose source projector is `1`; `||1 - P+||_2 = sqrt(n/2)`.
//! - `rank1`: the identity arrow on the graph of `a e_{n/2+1} e_1*` over `H+`, constant in `n`.
//! - `random-arrow`: a Haar arrow between graphs of fixed-norm rank-2 coefficients,
//!   whose commutator defect is bounded by the coefficient norms.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::axioms::{block_identity_residual, MONOTONICITY_SLACK};
use super::report::{
    order_label, serialize_order, Classification, ScalingRow, ScalingTable, TrialRecord,
    TrialReport,
};
use super::rng::{trial_rng, Stream};
use crate::error::{Error, Result};
use crate::grassmann::{chart_inverse, ChartCoordinates, Polarization, Subspace};
use crate::groupoid::{
    commutator, identity_arrow, random_arrow_with, unitary_arrow, PartialIsometry,
};
use crate::matcore::{
    c, complex_gaussian, identity, schatten_from_values, singular_values, Matrix, ToleranceConfig,
};

pub const SUITE_NAME: &str = "scaling";
pub const DEFAULT_DIMS: [usize; 6] = [8, 16, 32, 64, 128, 256];
/// Tilt of the rank-one probe.
pub const RANK1_TILT: f64 = 0.5;
/// Hilbert-Schmidt norm of each rank-two coefficient of the random-arrow probe.
pub const RANDOM_ARROW_HS: f64 = 0.5;
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    Identity,
    Rank1,
    RandomArrow,
}

impl Probe {
    pub const ALL: [Probe; 3] = [Probe::Identity, Probe::Rank1, Probe::RandomArrow];

    pub fn label(self) -> &'static str {
        match self {
            Probe::Identity => "identity",
            Probe::Rank1 => "rank1",
            Probe::RandomArrow => "random-arrow",
        }
    }

    /// Parses a probe tag; `all` selects every probe.
    pub fn parse_set(s: &str) -> Result<Vec<Probe>> {
        match s {
            "identity" => Ok(vec![Probe::Identity]),
            "rank1" => Ok(vec![Probe::Rank1]),
            "random-arrow" => Ok(vec![Probe::RandomArrow]),
            "all" => Ok(Probe::ALL.to_vec()),
            other => Err(Error::Config(format!(
                "unknown probe {other:?}; expected identity, rank1, random-arrow or all"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingConfig {
    pub dims: Vec<usize>,
    pub probes: Vec<Probe>,
    #[serde(serialize_with = "serialize_order")]
    pub schatten_order: f64,
    pub seed: u64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            dims: DEFAULT_DIMS.to_vec(),
            probes: Probe::ALL.to_vec(),
            schatten_order: 2.0,
            seed: 7,
        }
    }
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Config("at least one dimension is required".into()));
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n < 2 || n % 2 != 0) {
            return Err(Error::Config(format!(
                "dimension {n} must be even and at least 2"
            )));
        }
        if self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "dimensions must be strictly ascending".into(),
            ));
        }
        if self.probes.is_empty() {
            return Err(Error::Config("at least one probe is required".into()));
        }
        if self.schatten_order.is_nan() || self.schatten_order < 1.0 {
            return Err(Error::Config(format!(
                "Schatten order {} must be >= 1",
                self.schatten_order
            )));
        }
        Ok(())
    }

    /// `{1, 2, 4, inf}` together with the configured order, ascending.
    pub fn orders(&self) -> Vec<f64> {
        let mut orders = vec![1.0, 2.0, 4.0, f64::INFINITY, self.schatten_order];
        orders.sort_by(f64::total_cmp);
        orders.dedup();
        orders
    }
}

/// `||1 - P+||_2` for the identity probe at dimension `n`.
pub fn identity_defect(n: usize) -> f64 {
    (n as f64 / 2.0).sqrt()
}

/// Closed forms for the rank-one probe with tilt `a` at order `p`:
/// `P_V - P+` has singular values `a / sqrt(1+a^2)` twice and `[P_V, P+]` has
/// `a / (1+a^2)` twice.
pub fn rank1_defects(a: f64, p: f64) -> (f64, f64) {
    let mult = if p.is_infinite() {
        1.0
    } else {
        2f64.powf(1.0 / p)
    };
    let s = 1.0 + a * a;
    (mult * a / s.sqrt(), mult * a / s)
}

struct Measurement {
    quantity: &'static str,
    /// Singular values of the measured operator, descending.
    singular: Vec<f64>,
}

fn measure(quantity: &'static str, m: &Matrix) -> Result<Measurement> {
    Ok(Measurement {
        quantity,
        singular: singular_values(m)?,
    })
}

/// Rank-two `h x h` matrix with Hilbert-Schmidt norm `RANDOM_ARROW_HS`.
fn rank_two<R: Rng + ?Sized>(h: usize, rng: &mut R) -> Matrix {
    let m = complex_gaussian(h, 2, rng) * complex_gaussian(2, h, rng);
    let nrm = m.norm();
    m * c(RANDOM_ARROW_HS / nrm)
}

fn graph_over_h_plus(n: usize, coeff: Matrix) -> Result<Subspace> {
    let base = Subspace::coordinate(n, 0..n / 2);
    Ok(chart_inverse(&ChartCoordinates::new(base, coeff)?))
}

/// Probe arrow, its objects with optional defect bounds, and the commutator bound.
///
/// For the graph of `A` over `H+`, `P_V - P+` has singular values `sin(atan s_i)` in
/// pairs, so `||P_V - P+||_2 <= sqrt(2) ||A||_2`.
#[allow(clippy::type_complexity)]
fn probe_arrow(
    probe: Probe,
    n: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<(PartialIsometry, Vec<(Subspace, Option<f64>)>, Option<f64>)> {
    let h = n / 2;
    match probe {
        Probe::Identity => {
            let u = unitary_arrow(&identity(n), tol)?;
            Ok((u, vec![(Subspace::full(n), None)], None))
        }
        Probe::Rank1 => {
            let mut coeff = Matrix::zeros(h, h);
            coeff[(0, 0)] = c(RANK1_TILT);
            let v = graph_over_h_plus(n, coeff)?;
            Ok((identity_arrow(&v), vec![(v, None)], None))
        }
        Probe::RandomArrow => {
            let mut rng = trial_rng(seed, Stream::Scaling, n as u64);
            let a_s = rank_two(h, &mut rng);
            let a_t = rank_two(h, &mut rng);
            let bound = (a_s.norm_squared() + a_t.norm_squared()).sqrt();
            let (bound_s, bound_t) = (2f64.sqrt() * a_s.norm(), 2f64.sqrt() * a_t.norm());
            let src = graph_over_h_plus(n, a_s)?;
            let tgt = graph_over_h_plus(n, a_t)?;
            let u = random_arrow_with(&src, &tgt, &mut rng)?;
            Ok((
                u,
                vec![(src, Some(bound_s)), (tgt, Some(bound_t))],
                Some(bound),
            ))
        }
    }
}

struct DimensionResult {
    rows: Vec<ScalingRow>,
    record: TrialRecord,
    /// `(probe, quantity, p = 2 value, bound)` for classification.
    summaries: Vec<(Probe, &'static str, f64, Option<f64>)>,
}

fn run_dimension(cfg: &ScalingConfig, n: usize) -> Result<DimensionResult> {
    let tol = ToleranceConfig::default();
    let pol = Polarization::new(n / 2, n / 2)?;
    let orders = cfg.orders();
    let mut rows = Vec::new();
    let mut record = TrialRecord::default();
    let mut summaries = Vec::new();
    let mut worst_chain: f64 = 0.0;
    for &probe in &cfg.probes {
        let (u, objects, bound) = probe_arrow(probe, n, cfg.seed, &tol)?;
        let mut measurements = vec![(measure("commutator_defect", &commutator(&pol, &u)?)?, bound)];
        for ((v, b), name) in objects.iter().zip(["source_defect", "target_defect"]) {
            measurements.push((measure(name, &(v.projector() - pol.p_plus()))?, *b));
        }
        for (m, quantity_bound) in &measurements {
            let values = orders
                .iter()
                .map(|&p| schatten_from_values(&m.singular, p))
                .collect::<Result<Vec<_>>>()?;
            for (&p, &value) in orders.iter().zip(&values) {
                rows.push(ScalingRow {
                    n,
                    probe: probe.label().into(),
                    quantity: m.quantity.into(),
                    order: order_label(p),
                    value,
                });
            }
            let chain = values
                .windows(2)
                .map(|w| (w[1] - w[0]).max(0.0))
                .fold(0.0, f64::max);
            worst_chain = worst_chain.max(chain);
            let hs = values[orders
                .iter()
                .position(|&p| p == 2.0)
                .expect("order 2 is always present")];
            summaries.push((probe, m.quantity, hs, *quantity_bound));
            if let Some(b) = quantity_bound {
                record.residual("random_arrow_bounded", EXACT_TOL, (hs - b).max(0.0));
            }

            match (probe, m.quantity) {
                (Probe::Identity, "source_defect") => {
                    record.residual("identity_exact", EXACT_TOL, (hs - identity_defect(n)).abs());
                }
                (Probe::Rank1, quantity) => {
                    let worst = orders
                        .iter()
                        .zip(&values)
                        .map(|(&p, &v)| {
                            let (src, comm) = rank1_defects(RANK1_TILT, p);
                            let want = if quantity == "source_defect" {
                                src
                            } else {
                                comm
                            };
                            (v - want).abs()
                        })
                        .fold(0.0, f64::max);
                    record.residual("rank1_closed_form", EXACT_TOL, worst);
                }
                _ => {}
            }
        }
        record.check(
            "commutator_block_identity",
            super::axioms::BLOCK_IDENTITY_TOL,
            block_identity_residual(&pol, &u),
        );
    }
    record.residual("monotonicity", MONOTONICITY_SLACK, worst_chain);
    Ok(DimensionResult {
        rows,
        record,
        summaries,
    })
}

fn classify(values: &[f64], bound: Option<f64>) -> &'static str {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi - lo <= EXACT_TOL {
        "constant"
    } else if values.windows(2).all(|w| w[1] > w[0]) && bound.is_none() {
        "divergent"
    } else if bound.is_some_and(|b| hi <= b) {
        "bounded"
    } else {
        "unclassified"
    }
}

/// Runs every probe at every dimension. Returns the check report and the plot-ready table.
pub fn run_scaling_experiment(cfg: &ScalingConfig) -> Result<(TrialReport, ScalingTable)> {
    cfg.validate()?;
    let start = Instant::now();
    let per_dim: Vec<DimensionResult> = {
        use rayon::prelude::*;
        cfg.dims
            .par_iter()
            .map(|&n| run_dimension(cfg, n))
            .collect::<Result<Vec<_>>>()?
    };

    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut series: Vec<(Probe, &'static str, Vec<f64>, Option<f64>)> = Vec::new();
    for d in per_dim {
        rows.extend(d.rows);
        records.push(d.record);
        for (probe, quantity, hs, bound) in d.summaries {
            match series.iter_mut().find(|s| s.0 == probe && s.1 == quantity) {
                Some(s) => {
                    s.2.push(hs);
                    s.3 = match (s.3, bound) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        (a, b) => a.or(b),
                    };
                }
                None => series.push((probe, quantity, vec![hs], bound)),
            }
        }
    }

    let last = records.last_mut().expect("dims is non-empty");
    for (probe, quantity, values, _) in &series {
        match (probe, *quantity) {
            (Probe::Identity, "source_defect") => {
                let increasing = values.windows(2).all(|w| w[1] > w[0]);
                last.residual(
                    "identity_increasing",
                    0.5,
                    if increasing { 0.0 } else { 1.0 },
                );
            }
            (Probe::Rank1, quantity) => {
                let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - values.iter().cloned().fold(f64::INFINITY, f64::min);
                let name = if quantity == "source_defect" {
                    "rank1_constant"
                } else {
                    "rank1_commutator_constant"
                };
                last.residual(name, EXACT_TOL, spread);
            }
            _ => {}
        }
    }

    let classifications = series
        .iter()
        .map(|(probe, quantity, values, bound)| Classification {
            probe: probe.label().into(),
            quantity: (*quantity).into(),
            behaviour: classify(values, *bound).into(),
        })
        .collect();
    let report = TrialReport::aggregate(SUITE_NAME, &records, start.elapsed());
    Ok((
        report,
        ScalingTable {
            rows,
            classifications,
        },
    ))
}
