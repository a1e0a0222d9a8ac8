//! Jacobi factorizations for complex matrices.
//!
//! One-sided (Hestenes) Jacobi for the SVD and cyclic two-sided Jacobi for
//! Hermitian eigenproblems. Both reduce every 2x2 pivot to a real rotation after
//! removing the phase of the off-diagonal entry.

use num_complex::Complex64 as C64;

use super::Matrix;

const MAX_SWEEPS: usize = 80;

/// Real Jacobi rotation `(c, s)` that zeroes `g` in `[[alpha, g], [g, beta]]`.
fn rotation(alpha: f64, beta: f64, g: f64) -> (f64, f64) {
    let zeta = (beta - alpha) / (2.0 * g);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t)
}

/// Column pair update `p <- c p - s q`, `q <- s p + c q`, after `q <- q * phase`.
fn rotate_columns(m: &mut Matrix, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * phase;
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}

fn rotate_rows(m: &mut Matrix, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    for j in 0..m.ncols() {
        let xp = m[(p, j)];
        let xq = m[(q, j)] * phase;
        m[(p, j)] = xp * c - xq * s;
        m[(q, j)] = xp * s + xq * c;
    }
}

/// Thin SVD of a matrix with `rows >= cols`: returns `(U, s, V)` unsorted, with the
/// columns of `U` for vanishing singular values left as zero.
fn hestenes(a: &Matrix) -> Option<(Matrix, Vec<f64>, Matrix)> {
    let n = a.ncols();
    let mut work = a.clone();
    let mut v = Matrix::identity(n, n);
    let eps = f64::EPSILON;
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..work.nrows() {
                    let xp = work[(i, p)];
                    let xq = work[(i, q)];
                    alpha += xp.norm_sqr();
                    beta += xq.norm_sqr();
                    gamma += xp.conj() * xq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let (c, s) = rotation(alpha, beta, g);
                rotate_columns(&mut work, p, q, phase, c, s);
                rotate_columns(&mut v, p, q, phase, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return None;
    }
    let mut s = Vec::with_capacity(n);
    let mut u = Matrix::zeros(work.nrows(), n);
    for j in 0..n {
        let norm = work.column(j).norm();
        s.push(norm);
        if norm > 0.0 {
            u.set_column(j, &(work.column(j) / C64::new(norm, 0.0)));
        }
    }
    Some((u, s, v))
}

/// Fills zero columns of `u` so that all columns are orthonormal.
fn complete_columns(u: &mut Matrix) {
    let m = u.nrows();
    let mut candidate = 0;
    for j in 0..u.ncols() {
        if u.column(j).norm() > 0.5 {
            continue;
        }
        while candidate < m {
            let mut e = Matrix::zeros(m, 1);
            e[(candidate, 0)] = C64::new(1.0, 0.0);
            candidate += 1;
            // Two passes of Gram-Schmidt against the current columns.
            for _ in 0..2 {
                for k in 0..u.ncols() {
                    if u.column(k).norm() > 0.5 {
                        let proj = u.column(k).dotc(&e.column(0));
                        e.column_mut(0)
                            .axpy(-proj, &u.column(k), C64::new(1.0, 0.0));
                    }
                }
            }
            let norm = e.column(0).norm();
            if norm > 0.5 {
                u.set_column(j, &(e.column(0) / C64::new(norm, 0.0)));
                break;
            }
        }
    }
}

/// Thin SVD `A = U diag(s) V*` with `min(rows, cols)` singular triplets, descending.
pub(super) fn svd(a: &Matrix) -> Option<(Matrix, Vec<f64>, Matrix)> {
    let transpose = a.nrows() < a.ncols();
    let work = if transpose { a.adjoint() } else { a.clone() };
    let (mut u, s, v) = hestenes(&work)?;
    complete_columns(&mut u);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let s_sorted = order.iter().map(|&i| s[i]).collect();
    let u_sorted = Matrix::from_fn(u.nrows(), order.len(), |r, j| u[(r, order[j])]);
    let v_sorted = Matrix::from_fn(v.nrows(), order.len(), |r, j| v[(r, order[j])]);
    if transpose {
        Some((v_sorted, s_sorted, u_sorted))
    } else {
        Some((u_sorted, s_sorted, v_sorted))
    }
}

/// Singular values only, descending.
pub(super) fn singular_values(a: &Matrix) -> Option<Vec<f64>> {
    let work = if a.nrows() < a.ncols() {
        a.adjoint()
    } else {
        a.clone()
    };
    let (_, mut s, _) = hestenes(&work)?;
    s.sort_by(|x, y| y.total_cmp(x));
    Some(s)
}

/// Eigen-decomposition of a Hermitian matrix: `(eigenvalues, eigenvectors)`, unsorted.
pub(super) fn hermitian_eigen(h: &Matrix) -> Option<(Vec<f64>, Matrix)> {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = Matrix::identity(n, n);
    let scale = a.norm();
    if scale == 0.0 {
        return Some((vec![0.0; n], v));
    }
    let threshold = f64::EPSILON * scale * 1e-2;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = (apq / g).conj();
                let (c, s) = rotation(a[(p, p)].re, a[(q, q)].re, g);
                rotate_columns(&mut a, p, q, phase, c, s);
                rotate_rows(&mut a, p, q, phase.conj(), c, s);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rotate_columns(&mut v, p, q, phase, c, s);
            }
        }
    }
    if !converged {
        return None;
    }
    Some(((0..n).map(|i| a[(i, i)].re).collect(), v))
}
