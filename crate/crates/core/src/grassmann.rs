//! Truncated restricted Grassmannian.
//!
//! A [`Subspace`] carries an orthonormal frame together with its projector. Charts
//! send a subspace `V` near a base `W` to the operator `A: W -> W^perp` whose graph
//! is `V`; coordinates are stored as matrices in the orthonormal bases
//! `frame(W)` and `frame(W^perp)`.

use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matcore::{
    self, c, dist, herm_apply, identity, orthonormal_frame, projector_residual, schatten_norm,
    singular_values, HermFn, Matrix, ToleranceConfig,
};

/// The fixed splitting `C^n = H+ (+) H-`, with `H+` spanned by the first `n_plus`
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polarization {
    n_plus: usize,
    n_minus: usize,
    p_plus: Matrix,
}

impl Polarization {
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus == 0 {
            return Err(Error::Config("n_plus must be positive".into()));
        }
        let n = n_plus + n_minus;
        let p_plus = Matrix::from_fn(n, n, |i, j| c(if i == j && i < n_plus { 1.0 } else { 0.0 }));
        Ok(Self {
            n_plus,
            n_minus,
            p_plus,
        })
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn p_plus(&self) -> &Matrix {
        &self.p_plus
    }

    pub fn p_minus(&self) -> Matrix {
        identity(self.dim()) - &self.p_plus
    }

    pub fn h_plus(&self) -> Subspace {
        Subspace::coordinate(self.dim(), 0..self.n_plus)
    }

    /// `None` when `n_minus = 0`.
    pub fn h_minus(&self) -> Option<Subspace> {
        (self.n_minus > 0).then(|| Subspace::coordinate(self.dim(), self.n_plus..self.dim()))
    }

    /// The four blocks `(M_{++}, M_{+-}, M_{-+}, M_{--})` of a square operator.
    pub fn blocks(&self, m: &Matrix) -> (Matrix, Matrix, Matrix, Matrix) {
        let (np, nm) = (self.n_plus, self.n_minus);
        (
            m.view((0, 0), (np, np)).into_owned(),
            m.view((0, np), (np, nm)).into_owned(),
            m.view((np, 0), (nm, np)).into_owned(),
            m.view((np, np), (nm, nm)).into_owned(),
        )
    }
}

/// A point of the Grassmannian: orthonormal frame plus the cached projector `F F*`.
#[derive(Debug, Clone)]
pub struct Subspace {
    frame: Matrix,
    projector: Matrix,
    perp: OnceLock<Matrix>,
}

impl Subspace {
    /// Wraps a frame whose columns are orthonormal within `tol_equal`.
    pub fn from_frame(frame: Matrix, tol: &ToleranceConfig) -> Result<Self> {
        matcore::ensure_finite(&frame)?;
        check_dims(&frame)?;
        let gram = frame.adjoint() * &frame;
        let res = dist(&gram, &identity(frame.ncols()));
        if res > tol.tol_equal {
            return Err(Error::NotOrthonormal(res));
        }
        let projector = &frame * frame.adjoint();
        Ok(Self::from_parts(frame, projector))
    }

    /// Column span of any full-column-rank matrix.
    pub fn from_span(m: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        check_dims(m)?;
        let frame = orthonormal_frame(m, tol)?;
        let projector = &frame * frame.adjoint();
        Ok(Self::from_parts(frame, projector))
    }

    /// Range of an orthogonal projector.
    pub fn from_projector(p: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        matcore::ensure_finite(p)?;
        let res = projector_residual(p);
        if res > tol.tol_equal {
            return Err(Error::NotProjector(res));
        }
        let (vals, vecs) = matcore::hermitian_eigh(p)?;
        let n = p.nrows();
        let k = vals.iter().filter(|&&x| x > 0.5).count();
        if k == 0 {
            return Err(Error::RankDeficient { rank: 0, cols: 1 });
        }
        let frame = vecs.columns(n - k, k).into_owned();
        Ok(Self::from_parts(frame, p.clone()))
    }

    /// Span of a set of standard basis vectors.
    pub fn coordinate(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let idx: Vec<usize> = idx.into_iter().collect();
        let rest: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
        let frame = Matrix::from_fn(n, idx.len(), |r, j| c(if r == idx[j] { 1.0 } else { 0.0 }));
        let perp = Matrix::from_fn(n, rest.len(), |r, j| {
            c(if r == rest[j] { 1.0 } else { 0.0 })
        });
        let projector = &frame * frame.adjoint();
        let out = Self::from_parts(frame, projector);
        let _ = out.perp.set(perp);
        out
    }

    pub fn full(n: usize) -> Self {
        Self::coordinate(n, 0..n)
    }

    /// Span of the first `k` columns of a Haar unitary.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let u = matcore::random_unitary_with(n, rng);
        let frame = u.columns(0, k).into_owned();
        let projector = &frame * frame.adjoint();
        Self::from_parts(frame, projector)
    }

    pub(crate) fn from_parts(frame: Matrix, projector: Matrix) -> Self {
        Self {
            frame,
            projector,
            perp: OnceLock::new(),
        }
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Orthonormal frame of the complement; `n x 0` for the full space.
    pub fn perp_frame(&self) -> &Matrix {
        self.perp.get_or_init(|| {
            let n = self.ambient_dim();
            let m = n - self.dim();
            if m == 0 {
                return Matrix::zeros(n, 0);
            }
            // Leading left singular vectors of 1 - P span W^perp.
            let q = identity(n) - &self.projector;
            match matcore::svd(&q) {
                Ok(dec) => dec.u_factor.columns(0, m).into_owned(),
                Err(_) => Matrix::zeros(n, m),
            }
        })
    }

    /// `[frame(W) | frame(W^perp)]`, a unitary carrying the first `dim` coordinates onto `W`.
    pub fn adapted_basis(&self) -> Matrix {
        let n = self.ambient_dim();
        let mut g = Matrix::zeros(n, n);
        g.columns_mut(0, self.dim()).copy_from(&self.frame);
        g.columns_mut(self.dim(), n - self.dim())
            .copy_from(self.perp_frame());
        g
    }

    /// Worst violation of the projector and frame invariants.
    pub fn invariant_residual(&self) -> f64 {
        let r1 = projector_residual(&self.projector);
        let r2 = dist(&(&self.projector * &self.frame), &self.frame);
        let r3 = (self.projector.trace().re - self.dim() as f64).abs();
        r1.max(r2).max(r3)
    }

    pub fn distance(&self, other: &Subspace) -> f64 {
        dist(&self.projector, &other.projector)
    }
}

fn check_dims(m: &Matrix) -> Result<()> {
    if m.ncols() == 0 || m.ncols() > m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

/// A chart point: `coeff` is the `(n - k) x k` matrix of `A: W -> W^perp`.
#[derive(Debug, Clone)]
pub struct ChartCoordinates {
    pub base: Subspace,
    pub coeff: Matrix,
}

impl ChartCoordinates {
    pub fn new(base: Subspace, coeff: Matrix) -> Result<Self> {
        let want = (base.ambient_dim() - base.dim(), base.dim());
        if coeff.shape() != want {
            return Err(Error::DimensionMismatch {
                expected: want.0 * want.1,
                found: coeff.nrows() * coeff.ncols(),
            });
        }
        matcore::ensure_finite(&coeff)?;
        Ok(Self { base, coeff })
    }

    pub fn zero(base: Subspace) -> Self {
        let coeff = Matrix::zeros(base.ambient_dim() - base.dim(), base.dim());
        Self { base, coeff }
    }

    /// Column-wise graph frame `frame(W) + frame(W^perp) A` (not orthonormal).
    pub fn graph_frame(&self) -> Matrix {
        self.base.frame() + self.base.perp_frame() * &self.coeff
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainCheck {
    pub inside: bool,
    pub s_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedDefect {
    /// `||P_V - P+||_2`.
    pub hs_defect: f64,
    /// `||P_V - P+||_p` for `order`.
    pub p_defect: f64,
    pub order: f64,
    /// `||P+ P_V P-||_2`.
    pub offdiag_plus_minus: f64,
    /// `||P- P_V P+||_2`.
    pub offdiag_minus_plus: f64,
}

pub fn complement(w: &Subspace) -> Result<Subspace> {
    if w.dim() == w.ambient_dim() {
        return Err(Error::FullSpace);
    }
    let frame = w.perp_frame().clone();
    let projector = identity(w.ambient_dim()) - w.projector();
    Ok(Subspace::from_parts(frame, projector))
}

fn check_same_dim(w: &Subspace, v: &Subspace) -> Result<()> {
    if w.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: w.ambient_dim(),
            found: v.ambient_dim(),
        });
    }
    if w.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// `V` is in the chart at `W` iff `P_W` restricted to `V` is invertible, measured by the
/// smallest singular value of `frame(W)* frame(V)`.
pub fn in_chart_domain(w: &Subspace, v: &Subspace, tol: &ToleranceConfig) -> Result<DomainCheck> {
    check_same_dim(w, v)?;
    let overlap = w.frame().adjoint() * v.frame();
    let s_min = singular_values(&overlap)?.last().copied().unwrap_or(0.0);
    Ok(DomainCheck {
        inside: s_min > tol.tol_rank,
        s_min,
    })
}

/// Matrix of `P_{W^perp} (P_W|_V)^{-1}` in the adapted bases.
pub fn chart_forward(
    w: &Subspace,
    v: &Subspace,
    tol: &ToleranceConfig,
) -> Result<ChartCoordinates> {
    let check = in_chart_domain(w, v, tol)?;
    if !check.inside {
        return Err(Error::OutsideDomain { s_min: check.s_min });
    }
    let pv = v.projector();
    let pww = w.frame().adjoint() * pv * w.frame();
    let pmw = w.perp_frame().adjoint() * pv * w.frame();
    let inv = herm_apply(&pww, HermFn::Inverse, tol)
        .map_err(|_| Error::OutsideDomain { s_min: check.s_min })?;
    Ok(ChartCoordinates {
        base: w.clone(),
        coeff: pmw * inv,
    })
}

/// Projector onto the graph of `A` over `W`: in the basis `[frame(W) | frame(W^perp)]`
/// it has blocks `(1+A*A)^{-1}`, `(1+A*A)^{-1}A*`, `A(1+A*A)^{-1}`, `A(1+A*A)^{-1}A*`.
pub fn chart_inverse(coords: &ChartCoordinates) -> Subspace {
    let base = &coords.base;
    let (n, k) = (base.ambient_dim(), base.dim());
    let a = &coords.coeff;
    let tol = ToleranceConfig::default();
    let gram = identity(k) + a.adjoint() * a;
    // 1 + A*A >= 1, so both functions are always defined.
    let inv = herm_apply(&gram, HermFn::Inverse, &tol).expect("1 + A*A is positive definite");
    let inv_sqrt =
        herm_apply(&gram, HermFn::InverseSqrt, &tol).expect("1 + A*A is positive definite");

    let mut block = Matrix::zeros(n, n);
    let a_inv = a * &inv;
    block.view_mut((0, 0), (k, k)).copy_from(&inv);
    block
        .view_mut((0, k), (k, n - k))
        .copy_from(&(&inv * a.adjoint()));
    block.view_mut((k, 0), (n - k, k)).copy_from(&a_inv);
    block
        .view_mut((k, k), (n - k, n - k))
        .copy_from(&(&a_inv * a.adjoint()));
    let g = base.adapted_basis();
    let projector = &g * block * g.adjoint();
    let projector = (&projector + projector.adjoint()) * c(0.5);

    // Orthonormal graph frame: (W + W^perp A)(1 + A*A)^{-1/2}.
    let frame = coords.graph_frame() * inv_sqrt;
    Subspace::from_parts(frame, projector)
}

/// Blocks of `[frame(to) | frame(to^perp)]* [frame(from) | frame(from^perp)]`.
struct BaseChange {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
}

impl BaseChange {
    fn new(from: &Subspace, to: &Subspace) -> Self {
        let (e, e_perp) = (to.frame(), to.perp_frame());
        let (f, f_perp) = (from.frame(), from.perp_frame());
        Self {
            a: e.adjoint() * f,
            b: e.adjoint() * f_perp,
            c: e_perp.adjoint() * f,
            d: e_perp.adjoint() * f_perp,
        }
    }

    /// `P+(P_W + A)` in the target basis, with its inverse.
    fn middle(&self, coeff: &Matrix, tol: &ToleranceConfig) -> Result<(Matrix, Matrix)> {
        let m = &self.a + &self.b * coeff;
        let s = singular_values(&m)?;
        let s_max = s.first().copied().unwrap_or(0.0);
        let s_min = s.last().copied().unwrap_or(0.0);
        if !(s_min > tol.tol_rank * s_max.max(1.0)) {
            return Err(Error::OutsideDomain { s_min });
        }
        let inv = matcore::inverse(&m).ok_or(Error::OutsideDomain { s_min })?;
        Ok((m, inv))
    }
}

fn check_transition(coords: &ChartCoordinates, w_to: &Subspace) -> Result<()> {
    check_same_dim(&coords.base, w_to)
}

/// Chart change `phi_{to} o phi_{from}^{-1}` via the fractional map
/// `A -> P-(1_W + A) (P+(P_W + A))^{-1}`, written in the adapted basis of `w_to`.
pub fn transition(
    coords: &ChartCoordinates,
    w_to: &Subspace,
    tol: &ToleranceConfig,
) -> Result<ChartCoordinates> {
    check_transition(coords, w_to)?;
    let bc = BaseChange::new(&coords.base, w_to);
    let (_, m_inv) = bc.middle(&coords.coeff, tol)?;
    let numer = &bc.c + &bc.d * &coords.coeff;
    Ok(ChartCoordinates {
        base: w_to.clone(),
        coeff: numer * m_inv,
    })
}

/// Directional derivative of [`transition`] at `coords` along `direction`:
/// `P- H M^{-1} - P-(1_W + A) M^{-1} (P+ H) M^{-1}`.
pub fn transition_derivative(
    coords: &ChartCoordinates,
    w_to: &Subspace,
    direction: &Matrix,
    tol: &ToleranceConfig,
) -> Result<Matrix> {
    check_transition(coords, w_to)?;
    if direction.shape() != coords.coeff.shape() {
        return Err(Error::DimensionMismatch {
            expected: coords.coeff.len(),
            found: direction.len(),
        });
    }
    let bc = BaseChange::new(&coords.base, w_to);
    let (_, m_inv) = bc.middle(&coords.coeff, tol)?;
    let numer = &bc.c + &bc.d * &coords.coeff;
    let dh = &bc.d * direction;
    let bh = &bc.b * direction;
    Ok(dh * &m_inv - numer * &m_inv * bh * &m_inv)
}

pub fn restricted_defect(pol: &Polarization, v: &Subspace, p: f64) -> Result<RestrictedDefect> {
    if v.ambient_dim() != pol.dim() {
        return Err(Error::DimensionMismatch {
            expected: pol.dim(),
            found: v.ambient_dim(),
        });
    }
    let diff = v.projector() - pol.p_plus();
    let (_, pm, mp, _) = pol.blocks(v.projector());
    Ok(RestrictedDefect {
        hs_defect: schatten_norm(&diff, 2.0)?,
        p_defect: schatten_norm(&diff, p)?,
        order: p,
        offdiag_plus_minus: schatten_norm(&pm, 2.0)?,
        offdiag_minus_plus: schatten_norm(&mp, 2.0)?,
    })
}
