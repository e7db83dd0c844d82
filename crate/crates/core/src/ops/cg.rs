use std::fmt;

use super::{axpy, dot, SparseOperator};
use crate::error::{check_len, Error, Result};

/// Default relative residual tolerance for the inner solves.
pub const DEFAULT_CG_TOL: f64 = 1e-10;

/// A search direction with curvature `p^T M p` at or below this value stops
/// the iteration instead of dividing by it.
pub const CURVATURE_BREAKDOWN: f64 = 1e-300;

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations_used: usize,
    pub final_residual_norm: f64,
    pub converged: bool,
    /// Stopped on a non-positive curvature direction.
    pub breakdown: bool,
}

impl fmt::Display for CgReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iterations_used={}, final_residual_norm={:e}, converged={}, breakdown={}",
            self.iterations_used, self.final_residual_norm, self.converged, self.breakdown
        )
    }
}

/// Solves `(A^T A + rho L^T L) x = rhs` by conjugate gradients from `x = 0`.
///
/// Stops after `max_iters` iterations or once `||r|| <= tol * ||rhs||`.
pub fn cg_solve(
    a: &SparseOperator,
    l: &SparseOperator,
    rho: f64,
    rhs: &[f64],
    max_iters: usize,
    tol: f64,
) -> Result<(Vec<f64>, CgReport)> {
    cg_solve_from(a, l, rho, rhs, None, max_iters, tol)
}

/// As [`cg_solve`], optionally warm-started from `x0`.
pub fn cg_solve_from(
    a: &SparseOperator,
    l: &SparseOperator,
    rho: f64,
    rhs: &[f64],
    x0: Option<&[f64]>,
    max_iters: usize,
    tol: f64,
) -> Result<(Vec<f64>, CgReport)> {
    check_len("cg_solve: rhs", a.cols(), rhs.len())?;
    check_len("cg_solve: L.cols", a.cols(), l.cols())?;
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::invalid(format!("cg_solve needs rho >= 0, got {rho}")));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid(format!("cg_solve needs tol >= 0, got {tol}")));
    }
    let n = rhs.len();
    let apply_m = |v: &[f64]| -> Result<Vec<f64>> {
        let mut out = a.apply_normal(v)?;
        if rho != 0.0 {
            let reg = l.apply_normal(v)?;
            axpy(rho, &reg, &mut out);
        }
        Ok(out)
    };

    let mut x = match x0 {
        Some(x0) => {
            check_len("cg_solve: x0", n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };
    let mut r = rhs.to_vec();
    if x0.is_some() {
        let mx = apply_m(&x)?;
        axpy(-1.0, &mx, &mut r);
    }

    let target = tol * dot(rhs, rhs).sqrt();
    let mut rr = dot(&r, &r);
    let mut p = r.clone();
    let mut report = CgReport {
        iterations_used: 0,
        final_residual_norm: rr.sqrt(),
        converged: rr.sqrt() <= target,
        breakdown: false,
    };
    if report.converged {
        return Ok((x, report));
    }

    for it in 0..max_iters {
        let mp = apply_m(&p)?;
        let curvature = dot(&p, &mp);
        if curvature <= CURVATURE_BREAKDOWN {
            report.breakdown = true;
            break;
        }
        let alpha = rr / curvature;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &mp, &mut r);
        let rr_new = dot(&r, &r);
        report.iterations_used = it + 1;
        report.final_residual_norm = rr_new.sqrt();
        if report.final_residual_norm <= target {
            report.converged = true;
            break;
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    Ok((x, report))
}
