//! Cross-sections, unitary-group charts and groupoid charts.
//!
//! The model space of every chart is the span `E_k` of the first `k` coordinates,
//! where `k` is the dimension of the subspaces involved; with the default stratum
//! `k = n_plus` this is `H+`. A cross-section `sigma` assigns to a subspace `V` near
//! its base `W` a unitary with `sigma(V) E_k = V`. A groupoid chart transports an
//! arrow `u` to the unitary `sigma_t(uu*)^{-1} u sigma_s(u*u)` restricted to `E_k`
//! and records it, together with the Grassmann coordinates of `uu*` and `u*u`, as a
//! triple `(A, B, X)` with `X` skew-Hermitian.

use crate::error::{ChartComponent, Error, Result};
use crate::grassmann::{chart_forward, chart_inverse, transition, ChartCoordinates, Subspace};
use crate::groupoid::{self, PartialIsometry};
use crate::matcore::{
    self, c, dist, herm_apply, identity, op_norm, projector_residual, skew_exp, unitary_log,
    unitary_residual, HermFn, Matrix, ToleranceConfig,
};

pub const DEFAULT_DOMAIN_RADIUS: f64 = 0.99;
pub const DEFAULT_BRANCH_MARGIN: f64 = 1e-6;

/// Orthogonal projector onto the first `k` coordinates of `C^n`.
pub fn model_projector(n: usize, k: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| c(if i == j && i < k { 1.0 } else { 0.0 }))
}

/// Extends a `k x k` operator on the model space by zero to `C^n`.
pub fn extend_by_zero(block: &Matrix, n: usize) -> Matrix {
    let k = block.nrows();
    let mut out = Matrix::zeros(n, n);
    out.view_mut((0, 0), (k, k)).copy_from(block);
    out
}

/// Direct-rotation unitary `u` with `u q u* = p`:
/// `u = (pq + (1-p)(1-q)) (1 - (p-q)^2)^{-1/2}`, defined for `||p - q|| < 1`.
pub fn kato_unitary(p: &Matrix, q: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    if p.shape() != q.shape() {
        return Err(Error::DimensionMismatch {
            expected: p.nrows(),
            found: q.nrows(),
        });
    }
    for m in [p, q] {
        matcore::ensure_finite(m)?;
        let res = projector_residual(m);
        if res > tol.tol_equal {
            return Err(Error::NotProjector(res));
        }
    }
    let diff = p - q;
    let gap = op_norm(&diff);
    if gap >= 1.0 - tol.tol_rank {
        return Err(Error::DomainTooFar(gap));
    }
    let n = p.nrows();
    let one = identity(n);
    let rot = p * q + (&one - p) * (&one - q);
    let sq = &diff * &diff;
    let norm = herm_apply(
        &(&one - (&sq + sq.adjoint()) * c(0.5)),
        HermFn::InverseSqrt,
        tol,
    )?;
    Ok(rot * norm)
}

#[derive(Debug, Clone)]
pub struct CrossSection {
    base_subspace: Subspace,
    base_unitary: Matrix,
    domain_radius: f64,
}

impl CrossSection {
    /// Section at `base` with `g = [frame(W) | frame(W^perp)]` and the default radius.
    pub fn new(base: Subspace) -> Self {
        let base_unitary = base.adapted_basis();
        Self {
            base_subspace: base,
            base_unitary,
            domain_radius: DEFAULT_DOMAIN_RADIUS,
        }
    }

    pub fn with_unitary(
        base: Subspace,
        base_unitary: Matrix,
        domain_radius: f64,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if !(domain_radius > 0.0 && domain_radius <= 1.0) {
            return Err(Error::Config(format!(
                "domain radius {domain_radius} outside (0, 1]"
            )));
        }
        let res = unitary_residual(&base_unitary);
        if res > tol.tol_equal {
            return Err(Error::NotUnitary(res));
        }
        if base_unitary.nrows() != base.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: base.ambient_dim(),
                found: base_unitary.nrows(),
            });
        }
        let gp = &base_unitary * model_projector(base.ambient_dim(), base.dim());
        let res = dist(&(base.projector() * &gp), &gp);
        if res > tol.tol_equal {
            return Err(Error::ChartMismatch(
                "base unitary does not carry the model space onto the base",
            ));
        }
        Ok(Self {
            base_subspace: base,
            base_unitary,
            domain_radius,
        })
    }

    pub fn with_radius(mut self, domain_radius: f64) -> Result<Self> {
        if !(domain_radius > 0.0 && domain_radius <= 1.0) {
            return Err(Error::Config(format!(
                "domain radius {domain_radius} outside (0, 1]"
            )));
        }
        self.domain_radius = domain_radius;
        Ok(self)
    }

    pub fn base_subspace(&self) -> &Subspace {
        &self.base_subspace
    }

    pub fn base_unitary(&self) -> &Matrix {
        &self.base_unitary
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn dim(&self) -> usize {
        self.base_subspace.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base_subspace.ambient_dim()
    }

    pub fn contains(&self, v: &Subspace) -> bool {
        v.dim() == self.dim() && self.base_subspace.distance(v) < self.domain_radius
    }

    fn agrees_with(&self, other: &CrossSection, tol: &ToleranceConfig) -> bool {
        self.base_subspace.ambient_dim() == other.base_subspace.ambient_dim()
            && self.dim() == other.dim()
            && self.base_subspace.distance(&other.base_subspace) <= tol.tol_equal
            && dist(&self.base_unitary, &other.base_unitary) <= tol.tol_equal
    }
}

/// `sigma(V) = kato(P_V, P_W) g`, a unitary carrying the model space onto `V`.
pub fn section_apply(sec: &CrossSection, v: &Subspace, tol: &ToleranceConfig) -> Result<Matrix> {
    if v.ambient_dim() != sec.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sec.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    if v.dim() != sec.dim() {
        return Err(Error::DimensionMismatch {
            expected: sec.dim(),
            found: v.dim(),
        });
    }
    let distance = sec.base_subspace.distance(v);
    if !(distance < sec.domain_radius) {
        return Err(Error::OutsideSectionDomain {
            distance,
            radius: sec.domain_radius,
        });
    }
    let rot = kato_unitary(v.projector(), sec.base_subspace.projector(), tol)?;
    Ok(rot * &sec.base_unitary)
}

/// Principal-logarithm chart on `U(k)` centred at `base_point`.
#[derive(Debug, Clone)]
pub struct UnitaryChart {
    base_point: Matrix,
    branch_margin: f64,
}

impl UnitaryChart {
    pub fn new(base_point: Matrix, branch_margin: f64, tol: &ToleranceConfig) -> Result<Self> {
        matcore::ensure_finite(&base_point)?;
        let res = unitary_residual(&base_point);
        if res > tol.tol_equal {
            return Err(Error::NotUnitary(res));
        }
        if !(branch_margin > 0.0 && branch_margin < 2.0) {
            return Err(Error::Config(format!(
                "branch margin {branch_margin} outside (0, 2)"
            )));
        }
        Ok(Self {
            base_point,
            branch_margin,
        })
    }

    /// The chart centred at the unit, mapping `1` to `0`.
    pub fn identity(k: usize) -> Self {
        Self {
            base_point: identity(k),
            branch_margin: DEFAULT_BRANCH_MARGIN,
        }
    }

    pub fn base_point(&self) -> &Matrix {
        &self.base_point
    }

    pub fn branch_margin(&self) -> f64 {
        self.branch_margin
    }

    pub fn dim(&self) -> usize {
        self.base_point.nrows()
    }
}

pub fn unitary_chart_forward(
    ch: &UnitaryChart,
    u: &Matrix,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    if u.shape() != ch.base_point.shape() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: u.nrows(),
        });
    }
    unitary_log(&(ch.base_point.adjoint() * u), ch.branch_margin, tol)
}

pub fn unitary_chart_inverse(
    ch: &UnitaryChart,
    x: &Matrix,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    if x.shape() != ch.base_point.shape() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: x.nrows(),
        });
    }
    Ok(&ch.base_point * skew_exp(x, tol)?)
}

/// The chart `Phi_{alpha beta gamma}`: target section (gamma), source section (beta)
/// and unitary chart (alpha).
#[derive(Debug, Clone)]
pub struct GroupoidChart {
    pub target_section: CrossSection,
    pub source_section: CrossSection,
    pub unitary_chart: UnitaryChart,
}

impl GroupoidChart {
    pub fn new(
        target_section: CrossSection,
        source_section: CrossSection,
        unitary_chart: UnitaryChart,
    ) -> Result<Self> {
        if target_section.ambient_dim() != source_section.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: target_section.ambient_dim(),
                found: source_section.ambient_dim(),
            });
        }
        let k = target_section.dim();
        for found in [source_section.dim(), unitary_chart.dim()] {
            if found != k {
                return Err(Error::DimensionMismatch { expected: k, found });
            }
        }
        Ok(Self {
            target_section,
            source_section,
            unitary_chart,
        })
    }

    /// Chart with source and target sections exchanged, as needed for the inverse arrow.
    pub fn swapped(&self, unitary_chart: UnitaryChart) -> Result<Self> {
        Self::new(
            self.source_section.clone(),
            self.target_section.clone(),
            unitary_chart,
        )
    }

    pub fn dim(&self) -> usize {
        self.target_section.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.target_section.ambient_dim()
    }
}

#[derive(Debug, Clone)]
pub struct GroupoidCoordinates {
    /// `A` at `W_gamma`.
    pub target_coord: ChartCoordinates,
    /// `B` at `W_beta`.
    pub source_coord: ChartCoordinates,
    /// `X`, skew-Hermitian on the model space.
    pub algebra_coord: Matrix,
}

impl GroupoidCoordinates {
    /// Largest component-wise operator-norm difference.
    pub fn distance(&self, other: &GroupoidCoordinates) -> f64 {
        dist(&self.target_coord.coeff, &other.target_coord.coeff)
            .max(dist(&self.source_coord.coeff, &other.source_coord.coeff))
            .max(dist(&self.algebra_coord, &other.algebra_coord))
    }
}

fn in_component<T>(component: ChartComponent, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::OutsideDomain { .. }
        | Error::OutsideSectionDomain { .. }
        | Error::DomainTooFar(_)
        | Error::DimensionMismatch { .. } => Error::OutsideChartDomain {
            component,
            cause: Box::new(e),
        },
        other => other,
    })
}

fn check_base(
    coords: &ChartCoordinates,
    sec: &CrossSection,
    tol: &ToleranceConfig,
    what: &'static str,
) -> Result<()> {
    if coords.base.ambient_dim() != sec.ambient_dim()
        || coords.base.dim() != sec.dim()
        || coords.base.distance(sec.base_subspace()) > tol.tol_equal
    {
        return Err(Error::ChartMismatch(what));
    }
    Ok(())
}

/// `sigma_t(uu*)^{-1} u sigma_s(u*u)` on `C^n`; its model block is unitary and the
/// rest vanishes.
pub fn transported_operator(
    ch: &GroupoidChart,
    u: &PartialIsometry,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    let tgt = in_component(ChartComponent::Target, groupoid::target(u, tol))?;
    let src = in_component(ChartComponent::Source, groupoid::source(u, tol))?;
    let sigma_t = in_component(
        ChartComponent::Target,
        section_apply(&ch.target_section, &tgt, tol),
    )?;
    let sigma_s = in_component(
        ChartComponent::Source,
        section_apply(&ch.source_section, &src, tol),
    )?;
    Ok(sigma_t.adjoint() * u.op() * sigma_s)
}

pub fn groupoid_chart_forward(
    ch: &GroupoidChart,
    u: &PartialIsometry,
    tol: &ToleranceConfig,
) -> Result<GroupoidCoordinates> {
    if u.ambient_dim() != ch.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.ambient_dim(),
            found: u.ambient_dim(),
        });
    }
    let tgt = in_component(ChartComponent::Target, groupoid::target(u, tol))?;
    let src = in_component(ChartComponent::Source, groupoid::source(u, tol))?;
    let a = in_component(
        ChartComponent::Target,
        chart_forward(ch.target_section.base_subspace(), &tgt, tol),
    )?;
    let b = in_component(
        ChartComponent::Source,
        chart_forward(ch.source_section.base_subspace(), &src, tol),
    )?;
    let transported = transported_operator(ch, u, tol)?;
    let k = ch.dim();
    let block = transported.view((0, 0), (k, k)).into_owned();
    let x = unitary_chart_forward(&ch.unitary_chart, &block, tol).map_err(|e| match e {
        Error::NotUnitary(_) => Error::OutsideChartDomain {
            component: ChartComponent::Unitary,
            cause: Box::new(e),
        },
        other => other,
    })?;
    Ok(GroupoidCoordinates {
        target_coord: a,
        source_coord: b,
        algebra_coord: x,
    })
}

/// `sigma_gamma(V_A) psi_alpha^{-1}(X) sigma_beta(V_B)^{-1}`, with the unitary on the
/// model space extended by zero.
pub fn groupoid_chart_inverse(
    ch: &GroupoidChart,
    coords: &GroupoidCoordinates,
    tol: &ToleranceConfig,
) -> Result<PartialIsometry> {
    check_base(
        &coords.target_coord,
        &ch.target_section,
        tol,
        "target coordinate base differs from chart",
    )?;
    check_base(
        &coords.source_coord,
        &ch.source_section,
        tol,
        "source coordinate base differs from chart",
    )?;
    let va = chart_inverse(&coords.target_coord);
    let vb = chart_inverse(&coords.source_coord);
    let sigma_t = in_component(
        ChartComponent::Target,
        section_apply(&ch.target_section, &va, tol),
    )?;
    let sigma_s = in_component(
        ChartComponent::Source,
        section_apply(&ch.source_section, &vb, tol),
    )?;
    let unitary = unitary_chart_inverse(&ch.unitary_chart, &coords.algebra_coord, tol)?;
    let op = sigma_t * extend_by_zero(&unitary, ch.ambient_dim()) * sigma_s.adjoint();
    PartialIsometry::new(op, tol)
}

/// Inversion in coordinates: `(A, B, X) -> (B, A, psi'((psi^{-1}(X))*))`. `ch_out` must
/// carry the sections of `ch_in` exchanged.
pub fn inversion_in_chart(
    ch_in: &GroupoidChart,
    ch_out: &GroupoidChart,
    coords: &GroupoidCoordinates,
    tol: &ToleranceConfig,
) -> Result<GroupoidCoordinates> {
    if !ch_out
        .target_section
        .agrees_with(&ch_in.source_section, tol)
        || !ch_out
            .source_section
            .agrees_with(&ch_in.target_section, tol)
    {
        return Err(Error::ChartMismatch(
            "output chart must exchange the input chart's sections",
        ));
    }
    check_base(
        &coords.target_coord,
        &ch_in.target_section,
        tol,
        "target coordinate base differs from chart",
    )?;
    check_base(
        &coords.source_coord,
        &ch_in.source_section,
        tol,
        "source coordinate base differs from chart",
    )?;
    let unitary = unitary_chart_inverse(&ch_in.unitary_chart, &coords.algebra_coord, tol)?;
    let x = unitary_chart_forward(&ch_out.unitary_chart, &unitary.adjoint(), tol)?;
    Ok(GroupoidCoordinates {
        target_coord: coords.source_coord.clone(),
        source_coord: coords.target_coord.clone(),
        algebra_coord: x,
    })
}

/// Multiplication in coordinates: `((A, B, X), (B, C, X')) -> (A, C, psi''(psi^{-1}(X) psi'^{-1}(X')))`.
/// The left chart's source section must be the right chart's target section.
pub fn multiplication_in_chart(
    ch_left: &GroupoidChart,
    ch_right: &GroupoidChart,
    ch_out: &GroupoidChart,
    left: &GroupoidCoordinates,
    right: &GroupoidCoordinates,
    tol: &ToleranceConfig,
) -> Result<GroupoidCoordinates> {
    if !ch_left
        .source_section
        .agrees_with(&ch_right.target_section, tol)
    {
        return Err(Error::ChartMismatch(
            "left and right charts do not share the middle section",
        ));
    }
    if !ch_out
        .target_section
        .agrees_with(&ch_left.target_section, tol)
        || !ch_out
            .source_section
            .agrees_with(&ch_right.source_section, tol)
    {
        return Err(Error::ChartMismatch(
            "output chart sections must be (left target, right source)",
        ));
    }
    check_base(
        &left.target_coord,
        &ch_left.target_section,
        tol,
        "left target base differs from chart",
    )?;
    check_base(
        &left.source_coord,
        &ch_left.source_section,
        tol,
        "left source base differs from chart",
    )?;
    check_base(
        &right.target_coord,
        &ch_right.target_section,
        tol,
        "right target base differs from chart",
    )?;
    check_base(
        &right.source_coord,
        &ch_right.source_section,
        tol,
        "right source base differs from chart",
    )?;
    let mismatch = dist(&left.source_coord.coeff, &right.target_coord.coeff);
    if !(mismatch <= tol.tol_equal) {
        return Err(Error::NotComposable { mismatch });
    }
    let ul = unitary_chart_inverse(&ch_left.unitary_chart, &left.algebra_coord, tol)?;
    let ur = unitary_chart_inverse(&ch_right.unitary_chart, &right.algebra_coord, tol)?;
    let x = unitary_chart_forward(&ch_out.unitary_chart, &(ul * ur), tol)?;
    Ok(GroupoidCoordinates {
        target_coord: left.target_coord.clone(),
        source_coord: right.source_coord.clone(),
        algebra_coord: x,
    })
}

/// Identity section in coordinates: `B -> (B, B, 0)`. Requires equal source and
/// target sections and a unitary chart centred at the unit.
pub fn identity_in_chart(
    ch: &GroupoidChart,
    b: &ChartCoordinates,
    tol: &ToleranceConfig,
) -> Result<GroupoidCoordinates> {
    if !ch.target_section.agrees_with(&ch.source_section, tol) {
        return Err(Error::ChartMismatch(
            "identity chart needs equal source and target sections",
        ));
    }
    if dist(ch.unitary_chart.base_point(), &identity(ch.dim())) > tol.tol_equal {
        return Err(Error::ChartMismatch(
            "identity chart needs the unitary chart centred at the unit",
        ));
    }
    check_base(
        b,
        &ch.source_section,
        tol,
        "coordinate base differs from chart",
    )?;
    let v = chart_inverse(b);
    if !ch.source_section.contains(&v) {
        return Err(Error::OutsideChartDomain {
            component: ChartComponent::Source,
            cause: Box::new(Error::OutsideSectionDomain {
                distance: ch.source_section.base_subspace().distance(&v),
                radius: ch.source_section.domain_radius(),
            }),
        });
    }
    let k = ch.dim();
    Ok(GroupoidCoordinates {
        target_coord: b.clone(),
        source_coord: b.clone(),
        algebra_coord: Matrix::zeros(k, k),
    })
}

/// Chart change `Phi_to o Phi_from^{-1}` assembled from its closed-form pieces: Grassmann
/// transitions for `A` and `B`, and for `X` the five-factor product
/// `sigma_to,t(V_A)^{-1} sigma_from,t(V_A) psi_from^{-1}(X) sigma_from,s(V_B)^{-1} sigma_to,s(V_B)`
/// restricted to the model space.
pub fn groupoid_chart_transition(
    ch_from: &GroupoidChart,
    ch_to: &GroupoidChart,
    coords: &GroupoidCoordinates,
    tol: &ToleranceConfig,
) -> Result<GroupoidCoordinates> {
    check_base(
        &coords.target_coord,
        &ch_from.target_section,
        tol,
        "target coordinate base differs from chart",
    )?;
    check_base(
        &coords.source_coord,
        &ch_from.source_section,
        tol,
        "source coordinate base differs from chart",
    )?;
    let a = in_component(
        ChartComponent::Target,
        transition(
            &coords.target_coord,
            ch_to.target_section.base_subspace(),
            tol,
        ),
    )?;
    let b = in_component(
        ChartComponent::Source,
        transition(
            &coords.source_coord,
            ch_to.source_section.base_subspace(),
            tol,
        ),
    )?;
    let va = chart_inverse(&coords.target_coord);
    let vb = chart_inverse(&coords.source_coord);
    let t_to = in_component(
        ChartComponent::Target,
        section_apply(&ch_to.target_section, &va, tol),
    )?;
    let t_from = in_component(
        ChartComponent::Target,
        section_apply(&ch_from.target_section, &va, tol),
    )?;
    let s_from = in_component(
        ChartComponent::Source,
        section_apply(&ch_from.source_section, &vb, tol),
    )?;
    let s_to = in_component(
        ChartComponent::Source,
        section_apply(&ch_to.source_section, &vb, tol),
    )?;
    let unitary = unitary_chart_inverse(&ch_from.unitary_chart, &coords.algebra_coord, tol)?;
    let n = ch_from.ambient_dim();
    let k = ch_from.dim();
    let product = t_to.adjoint() * t_from * extend_by_zero(&unitary, n) * s_from.adjoint() * s_to;
    let block = product.view((0, 0), (k, k)).into_owned();
    let x = unitary_chart_forward(&ch_to.unitary_chart, &block, tol)?;
    Ok(GroupoidCoordinates {
        target_coord: a,
        source_coord: b,
        algebra_coord: x,
    })
}
