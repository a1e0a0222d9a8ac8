//! Random instances shared by the suites.

use rand::Rng;

use crate::grassmann::{chart_inverse, ChartCoordinates, Subspace};
use crate::matcore::{c, complex_gaussian, Matrix};

/// Gaussian `(n-k) x k` coefficient with operator norm close to `size`.
pub fn coefficient<R: Rng + ?Sized>(base: &Subspace, size: f64, rng: &mut R) -> Matrix {
    let (n, k) = (base.ambient_dim(), base.dim());
    // A complex Gaussian (n-k) x k matrix has operator norm about sqrt(n-k) + sqrt(k).
    let scale = size / (((n - k) as f64).sqrt() + (k as f64).sqrt());
    complex_gaussian(n - k, k, rng) * c(scale)
}

pub fn coordinates<R: Rng + ?Sized>(base: &Subspace, size: f64, rng: &mut R) -> ChartCoordinates {
    let coeff = coefficient(base, size, rng);
    ChartCoordinates {
        base: base.clone(),
        coeff,
    }
}

/// A subspace in the graph chart of `base` with coefficient of norm about `size`.
pub fn nearby<R: Rng + ?Sized>(base: &Subspace, size: f64, rng: &mut R) -> Subspace {
    chart_inverse(&coordinates(base, size, rng))
}
