//! Proximal map of isotropic total variation,
//! `argmin_z lambda * TV(z) + 1/2 ||z - x||^2`, by projected gradient on
//! the dual. Forward differences with a Neumann boundary; `div = -grad^T`.

use crate::error::{Error, Result};
use crate::ops::Image;

pub const DEFAULT_TV_INNER_ITERS: usize = 30;

/// `||grad||^2 <= 8` for the forward-difference gradient.
const DUAL_STEP: f64 = 1.0 / 8.0;

fn gradient(u: &[f64], w: usize, h: usize, gx: &mut [f64], gy: &mut [f64]) {
    for r in 0..h {
        for c in 0..w {
            let p = r * w + c;
            gx[p] = if c + 1 < w { u[p + 1] - u[p] } else { 0.0 };
            gy[p] = if r + 1 < h { u[p + w] - u[p] } else { 0.0 };
        }
    }
}

fn divergence(px: &[f64], py: &[f64], w: usize, h: usize, out: &mut [f64]) {
    for r in 0..h {
        for c in 0..w {
            let p = r * w + c;
            let dx = match c {
                _ if w == 1 => 0.0,
                0 => px[p],
                _ if c + 1 == w => -px[p - 1],
                _ => px[p] - px[p - 1],
            };
            let dy = match r {
                _ if h == 1 => 0.0,
                0 => py[p],
                _ if r + 1 == h => -py[p - w],
                _ => py[p] - py[p - w],
            };
            out[p] = dx + dy;
        }
    }
}

/// Isotropic total variation of `x`.
pub fn total_variation(x: &Image) -> f64 {
    let (w, h) = (x.width(), x.height());
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    gradient(x.data(), w, h, &mut gx, &mut gy);
    gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).sum()
}

/// Fixed-iteration approximation of the TV prox with weight `lambda`.
pub fn tv_prox(x: &Image, lambda: f64, inner_iters: usize) -> Result<Image> {
    if inner_iters == 0 {
        return Err(Error::invalid("tv_prox needs at least one inner iteration"));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("tv_prox weight must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(x.clone());
    }
    let (w, h) = (x.width(), x.height());
    let n = w * h;
    let xs: Vec<f64> = x.data().iter().map(|v| v / lambda).collect();
    let (mut px, mut py) = (vec![0.0; n], vec![0.0; n]);
    let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
    let mut div = vec![0.0; n];
    for _ in 0..inner_iters {
        divergence(&px, &py, w, h, &mut div);
        div.iter_mut().zip(&xs).for_each(|(d, s)| *d -= s);
        gradient(&div, w, h, &mut gx, &mut gy);
        for p in 0..n {
            let qx = px[p] + DUAL_STEP * gx[p];
            let qy = py[p] + DUAL_STEP * gy[p];
            let scale = qx.hypot(qy).max(1.0);
            px[p] = qx / scale;
            py[p] = qy / scale;
        }
    }
    divergence(&px, &py, w, h, &mut div);
    let z = x.data().iter().zip(&div).map(|(v, d)| v - lambda * d).collect();
    x.with_data(z)
}
