//! Dense vectors and images, sparse linear operators, and the two Krylov-type
//! kernels the solvers are built on: conjugate gradients for regularized
//! normal equations and power iteration for the operator norm.
//!
//! Vectors are plain `[f64]` slices. Every reduction runs in a fixed order so
//! results are bit-stable across runs.

mod cg;
mod image;
mod power;
mod sparse;

pub use cg::{cg_solve, cg_solve_from, CgReport, DEFAULT_CG_TOL, CURVATURE_BREAKDOWN};
pub use image::Image;
pub use power::power_iteration_norm_sq;
pub use sparse::SparseOperator;

use crate::error::{check_len, Result};

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `||a - b||_2`
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Gradient of the least-squares discrepancy `D(x) = ||Ax - b||^2`, i.e.
/// `2 A^T (Ax - b)`. No factor one half.
pub fn grad_ls(a: &SparseOperator, x: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len("grad_ls: b", a.rows(), b.len())?;
    let mut r = a.apply(x)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    let mut g = a.apply_adjoint(&r)?;
    g.iter_mut().for_each(|v| *v *= 2.0);
    Ok(g)
}

/// Least-squares discrepancy `||Ax - b||^2`.
pub fn discrepancy(a: &SparseOperator, x: &[f64], b: &[f64]) -> Result<f64> {
    check_len("discrepancy: b", a.rows(), b.len())?;
    let ax = a.apply(x)?;
    Ok(ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum())
}
