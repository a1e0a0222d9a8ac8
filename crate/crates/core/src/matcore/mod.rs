//! Dense complex linear algebra kernel.
//!
//! Every operator in the crate is a [`Matrix`]: a dense `nalgebra` matrix of
//! double-precision complex numbers acting on the truncated space `C^n`.
//! This module collects the factorizations, Schatten norms and Hermitian
//! functional calculus the geometric modules are built from.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod jacobi;

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// Numerical thresholds shared by every predicate in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative factorization tolerance.
    pub tol_factor: f64,
    /// Singular values below `tol_rank * s_max` count as zero.
    pub tol_rank: f64,
    /// Operator-norm threshold for projector / isometry / equality predicates.
    pub tol_equal: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_factor: 1e-10,
            tol_rank: 1e-10,
            tol_equal: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_factor", self.tol_factor),
            ("tol_rank", self.tol_rank),
            ("tol_equal", self.tol_equal),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Left singular vectors, one column per singular value.
    pub u_factor: Matrix,
    /// Non-negative, descending.
    pub singular_values: Vec<f64>,
    /// Right singular vectors, one column per singular value.
    pub v_factor: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let s = DMatrix::from_diagonal(&DVector::from_iterator(
            self.singular_values.len(),
            self.singular_values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        &self.u_factor * s * self.v_factor.adjoint()
    }
}

/// Functions available to [`herm_apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HermFn {
    Inverse,
    InverseSqrt,
    Sqrt,
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn is_finite(m: &Matrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Builds a complex matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> Matrix {
    Matrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x)))
}

/// Diagonal matrix with real entries.
pub fn real_diag(d: &[f64]) -> Matrix {
    Matrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|&x| c(x))))
}

pub fn svd(m: &Matrix) -> Result<SvdResult> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(SvdResult {
            u_factor: Matrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v_factor: Matrix::zeros(cols, 0),
        });
    }
    let (u_factor, singular_values, v_factor) = jacobi::svd(m).ok_or(Error::NonConvergence)?;
    Ok(SvdResult {
        u_factor,
        singular_values,
        v_factor,
    })
}

/// Singular values only, descending.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    ensure_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    jacobi::singular_values(m).ok_or(Error::NonConvergence)
}

/// Schatten p-norm; `p = f64::INFINITY` selects the operator norm.
pub fn schatten_norm(m: &Matrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidOrder(p));
    }
    if p == 2.0 {
        // Equal to the root sum of squared singular values, without the SVD.
        ensure_finite(m)?;
        return Ok(m.norm());
    }
    schatten_from_values(&singular_values(m)?, p)
}

/// Schatten p-norm from singular values sorted in descending order.
pub fn schatten_from_values(s: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidOrder(p));
    }
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    let s_max = s.first().copied().unwrap_or(0.0);
    if s_max == 0.0 {
        return Ok(0.0);
    }
    // Scale by s_max so large p does not overflow.
    let sum: f64 = s.iter().map(|&x| (x / s_max).powf(p)).sum();
    Ok(s_max * sum.powf(1.0 / p))
}

/// Operator norm used for every residual in the crate. Non-finite input yields `+inf`
/// so that residual comparisons fail rather than error.
pub fn op_norm(m: &Matrix) -> f64 {
    match singular_values(m) {
        Ok(s) => s.first().copied().unwrap_or(0.0),
        Err(_) => f64::INFINITY,
    }
}

pub fn dist(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    op_norm(&(a - b))
}

pub fn hermitian_residual(m: &Matrix) -> f64 {
    dist(m, &m.adjoint())
}

pub fn skew_residual(m: &Matrix) -> f64 {
    op_norm(&(m + m.adjoint()))
}

pub fn unitary_residual(m: &Matrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    dist(&(m.adjoint() * m), &identity(m.nrows()))
}

/// Worst of `P* = P` and `P^2 = P` in operator norm.
pub fn projector_residual(p: &Matrix) -> f64 {
    if !p.is_square() {
        return f64::INFINITY;
    }
    hermitian_residual(p).max(dist(&(p * p), p))
}

pub fn pinv(m: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let dec = svd(m)?;
    let s_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = tol.tol_rank * s_max;
    let (rows, cols) = m.shape();
    let mut out = Matrix::zeros(cols, rows);
    for (j, &s) in dec.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let vj = dec.v_factor.column(j);
            let uj = dec.u_factor.column(j);
            out += (vj * uj.adjoint()) * c(1.0 / s);
        }
    }
    Ok(out)
}

/// Hermitian eigendecomposition: eigenvalues ascending, eigenvectors as columns.
/// The input is symmetrized before factorization.
pub fn hermitian_eigh(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    ensure_finite(m)?;
    let sym = (m + m.adjoint()) * c(0.5);
    let (vals, vecs) = jacobi::hermitian_eigen(&sym).ok_or(Error::NonConvergence)?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted = order.iter().map(|&i| vals[i]).collect();
    let vecs = Matrix::from_fn(m.nrows(), order.len(), |r, j| vecs[(r, order[j])]);
    Ok((sorted, vecs))
}

/// `Q diag(f(lambda)) Q*` for a Hermitian eigendecomposition.
fn spectral_compose(vals: &[C64], vecs: &Matrix) -> Matrix {
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[(r, j)] *= v;
        }
    }
    scaled * vecs.adjoint()
}

pub fn herm_apply(m: &Matrix, f: HermFn, tol: &ToleranceConfig) -> Result<Matrix> {
    ensure_finite(m)?;
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let res = hermitian_residual(m);
    if res > tol.tol_equal {
        return Err(Error::NotHermitian(res));
    }
    let (vals, vecs) = hermitian_eigh(m)?;
    let lam_max = vals.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let mapped: Vec<C64> = match f {
        HermFn::Inverse | HermFn::InverseSqrt => {
            let cutoff = tol.tol_rank * lam_max;
            if let Some(&bad) = vals.iter().find(|&&x| x <= cutoff || x <= 0.0) {
                return Err(Error::SingularSpectrum(bad));
            }
            vals.iter()
                .map(|&x| {
                    c(if f == HermFn::Inverse {
                        1.0 / x
                    } else {
                        1.0 / x.sqrt()
                    })
                })
                .collect()
        }
        HermFn::Sqrt => {
            // Negative eigenvalues within rounding of zero are clamped.
            if let Some(&bad) = vals
                .iter()
                .find(|&&x| x < -tol.tol_equal.max(tol.tol_rank * lam_max))
            {
                return Err(Error::SingularSpectrum(bad));
            }
            vals.iter().map(|&x| c(x.max(0.0).sqrt())).collect()
        }
    };
    let out = spectral_compose(&mapped, &vecs);
    Ok((&out + out.adjoint()) * c(0.5))
}

/// Orthonormal basis of the column span of a full-column-rank matrix.
pub fn orthonormal_frame(m: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let cols = m.ncols();
    let dec = svd(m)?;
    let s_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let rank = dec
        .singular_values
        .iter()
        .filter(|&&s| s > tol.tol_rank * s_max && s > 0.0)
        .count();
    if rank < cols {
        return Err(Error::RankDeficient { rank, cols });
    }
    Ok(dec.u_factor.columns(0, cols).into_owned())
}

/// `rows x cols` matrix with i.i.d. standard complex Gaussian entries (`E|z|^2 = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `diag(R)`
/// pushed back into `Q`.
pub fn random_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let z = complex_gaussian(n, n, rng);
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary(n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(n, &mut rng)
}

/// Random skew-Hermitian matrix with operator norm exactly `radius`.
pub fn random_skew_hermitian<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Matrix {
    let g = complex_gaussian(n, n, rng);
    let x = (&g - g.adjoint()) * c(0.5);
    let nrm = op_norm(&x);
    if nrm == 0.0 {
        return x;
    }
    x * c(radius / nrm)
}

/// `exp(X)` for skew-Hermitian `X`, through the Hermitian matrix `-iX`.
pub fn skew_exp(x: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    ensure_finite(x)?;
    let res = skew_residual(x);
    if res > tol.tol_equal {
        return Err(Error::NotSkewHermitian(res));
    }
    let h = x * C64::new(0.0, -1.0);
    let (vals, vecs) = hermitian_eigh(&h)?;
    let phases: Vec<C64> = vals.iter().map(|&t| C64::new(0.0, t).exp()).collect();
    Ok(spectral_compose(&phases, &vecs))
}

/// Principal logarithm of a unitary matrix.
///
/// Uses the Cayley transform `K = i(1 - W)(1 + W)^{-1}`, which is Hermitian with
/// eigenvalues `tan(theta/2)` for the eigenphases `theta` of `W`, so only a Hermitian
/// eigensolver is needed. Fails with `BranchCut` when an eigenvalue of `W` lies
/// within `margin` of `-1`; for normal `W` that distance is the smallest singular
/// value of `1 + W`.
pub fn unitary_log(w: &Matrix, margin: f64, tol: &ToleranceConfig) -> Result<Matrix> {
    ensure_finite(w)?;
    let res = unitary_residual(w);
    if res > tol.tol_equal {
        return Err(Error::NotUnitary(res));
    }
    let n = w.nrows();
    let one_plus = identity(n) + w;
    let s = singular_values(&one_plus)?;
    let distance = s.last().copied().unwrap_or(f64::INFINITY);
    if distance <= margin {
        return Err(Error::BranchCut { distance, margin });
    }
    let inv = one_plus
        .clone()
        .try_inverse()
        .ok_or(Error::BranchCut { distance, margin })?;
    let k = (identity(n) - w) * inv * C64::new(0.0, 1.0);
    let (vals, vecs) = hermitian_eigh(&k)?;
    let angles: Vec<C64> = vals
        .iter()
        .map(|&t| C64::new(0.0, 2.0 * t.atan()))
        .collect();
    let x = spectral_compose(&angles, &vecs);
    Ok((&x - x.adjoint()) * c(0.5))
}

/// Square inverse via LU. Returns `None` when numerically singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if !is_finite(m) {
        return None;
    }
    m.clone().try_inverse().filter(is_finite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn svd_small_cases() {
        let s = svd(&real_diag(&[3.0, 4.0])).unwrap().singular_values;
        assert!(close(s[0], 4.0, 1e-14) && close(s[1], 3.0, 1e-14));
        let s = svd(&Matrix::zeros(2, 2)).unwrap().singular_values;
        assert_eq!(s, vec![0.0, 0.0]);
        // M*M = diag(1, 0)
        let s = svd(&from_real_rows(2, 2, &[0.0, 0.0, 1.0, 0.0]))
            .unwrap()
            .singular_values;
        assert!(close(s[0], 1.0, 1e-14) && close(s[1], 0.0, 1e-14));
    }

    #[test]
    fn svd_rejects_nan() {
        let mut m = identity(2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(svd(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn schatten_diag() {
        let m = real_diag(&[3.0, 4.0]);
        assert!(close(schatten_norm(&m, 2.0).unwrap(), 5.0, 1e-14));
        assert!(close(schatten_norm(&m, 1.0).unwrap(), 7.0, 1e-14));
        assert!(close(schatten_norm(&m, f64::INFINITY).unwrap(), 4.0, 1e-14));
        assert!(close(
            schatten_norm(&m, 3.0).unwrap(),
            91f64.powf(1.0 / 3.0),
            1e-13
        ));
        assert!(matches!(
            schatten_norm(&m, 0.5),
            Err(Error::InvalidOrder(_))
        ));
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&real_diag(&[2.0, 0.0]), &tol()).unwrap();
        assert!(dist(&p, &real_diag(&[0.5, 0.0])) < 1e-14);
        let u = random_unitary(4, 3);
        assert!(dist(&pinv(&u, &tol()).unwrap(), &u.adjoint()) < 1e-12);
        let m = from_real_rows(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let want = from_real_rows(2, 2, &[0.5, 0.0, 0.5, 0.0]);
        assert!(dist(&pinv(&m, &tol()).unwrap(), &want) < 1e-14);
    }

    #[test]
    fn herm_apply_examples() {
        let t = tol();
        let r = herm_apply(&real_diag(&[4.0, 1.0]), HermFn::InverseSqrt, &t).unwrap();
        assert!(dist(&r, &real_diag(&[0.5, 1.0])) < 1e-14);
        assert!(
            dist(
                &herm_apply(&identity(3), HermFn::Inverse, &t).unwrap(),
                &identity(3)
            ) < 1e-14
        );
        let m = from_real_rows(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let want = from_real_rows(2, 2, &[2.0, -1.0, -1.0, 2.0]) * c(1.0 / 3.0);
        assert!(dist(&herm_apply(&m, HermFn::Inverse, &t).unwrap(), &want) < 1e-14);
        let r = herm_apply(&real_diag(&[4.0, 9.0]), HermFn::Sqrt, &t).unwrap();
        assert!(dist(&r, &real_diag(&[2.0, 3.0])) < 1e-14);
    }

    #[test]
    fn herm_apply_errors() {
        let t = tol();
        let m = from_real_rows(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            herm_apply(&m, HermFn::Inverse, &t),
            Err(Error::NotHermitian(_))
        ));
        let s = real_diag(&[1.0, 0.0]);
        assert!(matches!(
            herm_apply(&s, HermFn::Inverse, &t),
            Err(Error::SingularSpectrum(_))
        ));
        assert!(matches!(
            herm_apply(&s, HermFn::InverseSqrt, &t),
            Err(Error::SingularSpectrum(_))
        ));
    }

    #[test]
    fn frames() {
        let t = tol();
        let f = orthonormal_frame(&from_real_rows(2, 1, &[1.0, 1.0]), &t).unwrap();
        let proj = &f * f.adjoint();
        assert!(dist(&proj, &from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5])) < 1e-14);
        let f = orthonormal_frame(&identity(3), &t).unwrap();
        assert!(dist(&(&f * f.adjoint()), &identity(3)) < 1e-14);
        let f = orthonormal_frame(&from_real_rows(2, 2, &[1.0, 1.0, 0.0, 1.0]), &t).unwrap();
        assert!(unitary_residual(&f) < 1e-14);
        let bad = from_real_rows(2, 2, &[1.0, 2.0, 1.0, 2.0]);
        assert!(matches!(
            orthonormal_frame(&bad, &t),
            Err(Error::RankDeficient { rank: 1, cols: 2 })
        ));
    }

    #[test]
    fn random_unitary_properties() {
        let u1 = random_unitary(1, 11);
        assert!(close(u1[(0, 0)].norm(), 1.0, 1e-14));
        for n in [2, 5, 16] {
            assert!(unitary_residual(&random_unitary(n, 99)) <= 1e-12);
        }
        assert_eq!(random_unitary(6, 42), random_unitary(6, 42));
        assert_ne!(random_unitary(6, 42), random_unitary(6, 43));
    }

    #[test]
    fn log_exp_scalar() {
        let t = tol();
        let i = C64::new(0.0, 1.0);
        let w = Matrix::from_element(1, 1, i);
        let x = unitary_log(&w, 1e-6, &t).unwrap();
        assert!((x[(0, 0)] - C64::new(0.0, std::f64::consts::FRAC_PI_2)).norm() < 1e-14);
        let back = skew_exp(&x, &t).unwrap();
        assert!((back[(0, 0)] - i).norm() < 1e-14);
        let minus = Matrix::from_element(1, 1, c(-1.0));
        assert!(matches!(
            unitary_log(&minus, 1e-6, &t),
            Err(Error::BranchCut { .. })
        ));
        assert!(matches!(
            skew_exp(&identity(2), &t),
            Err(Error::NotSkewHermitian(_))
        ));
    }

    #[test]
    fn log_exp_degenerate_spectrum() {
        // Repeated eigenvalues must not confuse the eigensolver.
        let t = tol();
        let q = random_unitary(4, 5);
        let d = Matrix::from_diagonal(&DVector::from_vec(vec![
            C64::from_polar(1.0, 0.7),
            C64::from_polar(1.0, 0.7),
            C64::from_polar(1.0, -2.9),
            c(1.0),
        ]));
        let w = &q * d * q.adjoint();
        let x = unitary_log(&w, 1e-6, &t).unwrap();
        assert!(skew_residual(&x) < 1e-14);
        assert!(dist(&skew_exp(&x, &t).unwrap(), &w) < 1e-12);
    }

    #[test]
    fn svd_of_rank_deficient_projector() {
        // Complement projector of a random 3-plane in C^6: singular values (1,1,1,0,0,0).
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary_with(6, &mut rng);
        let f = u.columns(0, 3).into_owned();
        let q = identity(6) - &f * f.adjoint();
        let dec = svd(&q).unwrap();
        for (i, s) in dec.singular_values.iter().enumerate() {
            let want = if i < 3 { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-14, "{:?}", dec.singular_values);
        }
        assert!(dist(&dec.reconstruct(), &q) < 1e-14);
        assert!(unitary_residual(&dec.u_factor) < 1e-14);
        assert!(unitary_residual(&dec.v_factor) < 1e-14);
    }

    #[test]
    fn wide_and_tall_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (r, c_) in [(2, 7), (7, 2), (1, 4), (4, 1)] {
            let m = complex_gaussian(r, c_, &mut rng);
            let dec = svd(&m).unwrap();
            assert_eq!(dec.singular_values.len(), r.min(c_));
            assert!(dist(&dec.reconstruct(), &m) < 1e-13);
            let gu = dec.u_factor.adjoint() * &dec.u_factor;
            assert!(dist(&gu, &identity(r.min(c_))) < 1e-13);
        }
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-3.0f64..3.0, 2 * rows * cols).prop_map(move |v| {
            Matrix::from_fn(rows, cols, |r, c_| {
                let k = 2 * (r * cols + c_);
                C64::new(v[k], v[k + 1])
            })
        })
    }

    proptest! {
        #[test]
        fn hs_norm_is_entrywise(m in arb_matrix(4, 3)) {
            let hs = schatten_norm(&m, 2.0).unwrap();
            let s = singular_values(&m).unwrap();
            let from_sv: f64 = s.iter().map(|x| x * x).sum();
            let entry: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((hs * hs - entry).abs() <= 1e-12 * entry.max(1.0));
            prop_assert!((from_sv - entry).abs() <= 1e-12 * entry.max(1.0));
        }

        #[test]
        fn holder_trace_class(a in arb_matrix(3, 3), b in arb_matrix(3, 3)) {
            let lhs = schatten_norm(&(&a * &b), 1.0).unwrap();
            let rhs = schatten_norm(&a, 2.0).unwrap() * schatten_norm(&b, 2.0).unwrap();
            prop_assert!(lhs <= rhs + 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn svd_reconstructs(m in arb_matrix(3, 5)) {
            let dec = svd(&m).unwrap();
            prop_assert!(dec.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(dist(&dec.reconstruct(), &m) <= 1e-10 * op_norm(&m).max(1e-300) + 1e-300);
        }

        #[test]
        fn low_rank_svd(seed in 0u64..500, rank in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = complex_gaussian(5, rank, &mut rng) * complex_gaussian(rank, 4, &mut rng);
            let dec = svd(&m).unwrap();
            prop_assert!(dist(&dec.reconstruct(), &m) <= 1e-10 * op_norm(&m).max(1.0));
            prop_assert!(unitary_residual(&dec.v_factor) <= 1e-12);
            let gu = dec.u_factor.adjoint() * &dec.u_factor;
            prop_assert!(dist(&gu, &identity(4)) <= 1e-12);
            prop_assert!(dec.singular_values[rank..].iter().all(|&s| s <= 1e-12 * op_norm(&m).max(1.0)));
        }

        #[test]
        fn hermitian_eigen_reconstructs(seed in 0u64..500, rank in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = complex_gaussian(5, rank, &mut rng);
            let h = &g * g.adjoint() - identity(5) * c(0.7);
            let (vals, vecs) = hermitian_eigh(&h).unwrap();
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(unitary_residual(&vecs) <= 1e-12);
            let rebuilt = spectral_compose(&vals.iter().map(|&x| c(x)).collect::<Vec<_>>(), &vecs);
            prop_assert!(dist(&rebuilt, &h) <= 1e-12 * op_norm(&h).max(1.0));
        }

        #[test]
        fn pinv_penrose(m in arb_matrix(4, 3)) {
            let t = tol();
            let p = pinv(&m, &t).unwrap();
            prop_assert!(dist(&(&m * &p * &m), &m) <= t.tol_equal);
            prop_assert!(hermitian_residual(&(&m * &p)) <= t.tol_equal);
        }

        #[test]
        fn pinv_involution_full_rank(seed in 0u64..1000) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = complex_gaussian(3, 3, &mut rng) + identity(3) * c(3.0);
            let back = pinv(&pinv(&m, &t).unwrap(), &t).unwrap();
            prop_assert!(dist(&back, &m) <= t.tol_equal);
        }

        #[test]
        fn herm_inverse_is_inverse(seed in 0u64..1000) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = complex_gaussian(4, 4, &mut rng);
            let h = &g * g.adjoint() + identity(4);
            let inv = herm_apply(&h, HermFn::Inverse, &t).unwrap();
            prop_assert!(dist(&(inv * &h), &identity(4)) <= t.tol_equal);
        }

        #[test]
        fn log_exp_roundtrip(seed in 0u64..1000) {
            let t = tol();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_skew_hermitian(3, 2.5, &mut rng);
            let u = skew_exp(&x, &t).unwrap();
            prop_assert!(unitary_residual(&u) <= 1e-12);
            let back = unitary_log(&u, 1e-6, &t).unwrap();
            prop_assert!(dist(&back, &x) <= 1e-10);
        }
    }
}
