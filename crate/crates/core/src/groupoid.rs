//! Partial isometries as arrows of the groupoid over the Grassmannian.
//!
//! An arrow `u` goes from its initial space `s(u) = u*u` to its final space
//! `t(u) = uu*`. Two arrows compose when `s(g) = t(h)`, the product is `gh`, the
//! inverse is `u*` and the unit at `V` is the projector `P_V`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grassmann::{Polarization, Subspace};
use crate::matcore::{
    self, dist, identity, projector_residual, schatten_norm, Matrix, ToleranceConfig,
};

#[derive(Debug, Clone)]
pub struct PartialIsometry {
    op: Matrix,
    source_proj: Matrix,
    target_proj: Matrix,
}

impl PartialIsometry {
    /// Validates `u u* u = u` and that `u*u`, `uu*` are projectors of equal rank.
    pub fn new(op: Matrix, tol: &ToleranceConfig) -> Result<Self> {
        matcore::ensure_finite(&op)?;
        if !op.is_square() {
            return Err(Error::DimensionMismatch {
                expected: op.nrows(),
                found: op.ncols(),
            });
        }
        let u = Self::new_unchecked(op);
        let res = u.invariant_residual();
        if res > tol.tol_equal {
            return Err(Error::NotPartialIsometry(res));
        }
        Ok(u)
    }

    /// Builds an arrow without checking the partial-isometry identities. Used to feed
    /// deliberately corrupted operators to the verification suites.
    pub fn new_unchecked(op: Matrix) -> Self {
        let source_proj = op.adjoint() * &op;
        let target_proj = &op * op.adjoint();
        Self {
            op,
            source_proj,
            target_proj,
        }
    }

    pub fn op(&self) -> &Matrix {
        &self.op
    }

    pub fn source_proj(&self) -> &Matrix {
        &self.source_proj
    }

    pub fn target_proj(&self) -> &Matrix {
        &self.target_proj
    }

    pub fn ambient_dim(&self) -> usize {
        self.op.nrows()
    }

    /// Worst of `||uu*u - u||`, `||u*uu* - u*||`, the two projector residuals and the
    /// source/target trace mismatch.
    pub fn invariant_residual(&self) -> f64 {
        let u = &self.op;
        let r1 = dist(&(&self.target_proj * u), u);
        let r2 = dist(&(&self.source_proj * u.adjoint()), &u.adjoint());
        let r3 = projector_residual(&self.source_proj).max(projector_residual(&self.target_proj));
        let r4 = (self.source_proj.trace() - self.target_proj.trace()).norm();
        r1.max(r2).max(r3).max(r4)
    }
}

/// A pair `(g, h)` with `s(g) = t(h)` up to `mismatch`.
#[derive(Debug, Clone, Copy)]
pub struct ComposablePair<'a> {
    pub left: &'a PartialIsometry,
    pub right: &'a PartialIsometry,
    pub mismatch: f64,
}

impl<'a> ComposablePair<'a> {
    pub fn new(
        left: &'a PartialIsometry,
        right: &'a PartialIsometry,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let mismatch = dist(left.source_proj(), right.target_proj());
        if !(mismatch <= tol.tol_equal) {
            return Err(Error::NotComposable { mismatch });
        }
        Ok(Self {
            left,
            right,
            mismatch,
        })
    }

    pub fn product(&self, tol: &ToleranceConfig) -> Result<PartialIsometry> {
        PartialIsometry::new(self.left.op() * self.right.op(), tol)
    }
}

pub fn source(u: &PartialIsometry, tol: &ToleranceConfig) -> Result<Subspace> {
    Subspace::from_projector(u.source_proj(), tol)
}

pub fn target(u: &PartialIsometry, tol: &ToleranceConfig) -> Result<Subspace> {
    Subspace::from_projector(u.target_proj(), tol)
}

/// `g . h`, defined only when `s(g) = t(h)` within `tol_equal`.
pub fn compose(
    g: &PartialIsometry,
    h: &PartialIsometry,
    tol: &ToleranceConfig,
) -> Result<PartialIsometry> {
    ComposablePair::new(g, h, tol)?.product(tol)
}

pub fn invert(u: &PartialIsometry) -> PartialIsometry {
    PartialIsometry {
        op: u.op.adjoint(),
        source_proj: u.target_proj.clone(),
        target_proj: u.source_proj.clone(),
    }
}

pub fn identity_arrow(v: &Subspace) -> PartialIsometry {
    let p = v.projector().clone();
    PartialIsometry {
        op: p.clone(),
        source_proj: p.clone(),
        target_proj: p,
    }
}

/// `||[u, P+]||_p`.
pub fn commutator_defect(pol: &Polarization, u: &PartialIsometry, p: f64) -> Result<f64> {
    schatten_norm(&commutator(pol, u)?, p)
}

pub fn commutator(pol: &Polarization, u: &PartialIsometry) -> Result<Matrix> {
    if u.ambient_dim() != pol.dim() {
        return Err(Error::DimensionMismatch {
            expected: pol.dim(),
            found: u.ambient_dim(),
        });
    }
    let pp = pol.p_plus();
    Ok(u.op() * pp - pp * u.op())
}

/// Hilbert-Schmidt norms of the off-diagonal blocks `(u_{+-}, u_{-+})`.
pub fn offdiagonal_norms(pol: &Polarization, u: &PartialIsometry) -> Result<(f64, f64)> {
    if u.ambient_dim() != pol.dim() {
        return Err(Error::DimensionMismatch {
            expected: pol.dim(),
            found: u.ambient_dim(),
        });
    }
    let (_, pm, mp, _) = pol.blocks(u.op());
    Ok((pm.norm(), mp.norm()))
}

/// `frame(tgt) V frame(src)*` with `V` Haar on `U(k)`.
pub fn random_arrow_with<R: Rng + ?Sized>(
    src: &Subspace,
    tgt: &Subspace,
    rng: &mut R,
) -> Result<PartialIsometry> {
    if src.ambient_dim() != tgt.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: src.ambient_dim(),
            found: tgt.ambient_dim(),
        });
    }
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            found: tgt.dim(),
        });
    }
    let v = matcore::random_unitary_with(src.dim(), rng);
    let op = tgt.frame() * v * src.frame().adjoint();
    Ok(PartialIsometry {
        op,
        source_proj: src.projector().clone(),
        target_proj: tgt.projector().clone(),
    })
}

pub fn random_arrow(src: &Subspace, tgt: &Subspace, seed: u64) -> Result<PartialIsometry> {
    random_arrow_with(src, tgt, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A unitary on the whole space seen as an arrow from the full space to itself.
pub fn unitary_arrow(u: &Matrix, tol: &ToleranceConfig) -> Result<PartialIsometry> {
    let res = matcore::unitary_residual(u);
    if res > tol.tol_equal {
        return Err(Error::NotUnitary(res));
    }
    let n = u.nrows();
    Ok(PartialIsometry {
        op: u.clone(),
        source_proj: identity(n),
        target_proj: identity(n),
    })
}
