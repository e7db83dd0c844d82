//! Blending a denoiser output back toward its input so that the combined
//! step keeps (or is chosen for) a good data fit.

use crate::denoise::{denoise, DenoiserSpec};
use crate::error::{Error, Result};
use crate::ops::{dist, Image};

/// `0.05, 0.10, ..., 1.00`
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 20.0).collect()
}

/// `x + alpha (hx - x)`
pub fn blend(x: &Image, hx: &Image, alpha: f64) -> Image {
    let data = x
        .data()
        .iter()
        .zip(hx.data())
        .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
        .collect();
    x.with_data(data).expect("same shape")
}

/// Caps the denoising change at `gamma` times the gradient step:
/// `alpha = min(1, gamma * grad_step_norm / ||hx - x||)`.
pub fn attenuate_gamma(x: &Image, hx: &Image, grad_step_norm: f64, gamma: f64) -> (Image, f64) {
    let change = dist(hx.data(), x.data());
    let alpha = if change == 0.0 {
        1.0
    } else {
        (gamma * grad_step_norm / change).min(1.0)
    };
    (blend(x, hx, alpha), alpha)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("alpha grid is empty"));
    }
    if let Some(a) = grid.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Error::invalid(format!("alpha grid value {a} outside (0, 1]")));
    }
    Ok(())
}

/// Picks the grid `alpha` whose blend minimizes `score`; ties go to the
/// smallest `alpha`.
pub fn attenuate_select(
    x: &Image,
    hx: &Image,
    alpha_grid: &[f64],
    mut score: impl FnMut(&Image) -> Result<f64>,
) -> Result<(Image, f64)> {
    check_grid(alpha_grid)?;
    let mut grid = alpha_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut best: Option<(f64, Image, f64)> = None;
    for alpha in grid {
        let z = blend(x, hx, alpha);
        let s = score(&z)?;
        if best.as_ref().is_none_or(|b| s < b.0) {
            best = Some((s, z, alpha));
        }
    }
    let (_, z, alpha) = best.expect("grid is nonempty");
    Ok((z, alpha))
}

/// Uniform grid of `grid_size` strengths over `[lo, hi]`.
pub fn sigma_grid(lo: f64, hi: f64, grid_size: usize) -> Result<Vec<f64>> {
    if !(lo >= 0.0 && hi >= lo) {
        return Err(Error::invalid(format!("sigma range needs 0 <= lo <= hi, got [{lo}, {hi}]")));
    }
    if grid_size < 2 {
        return Err(Error::invalid("sigma grid needs at least two points"));
    }
    let step = (hi - lo) / (grid_size - 1) as f64;
    Ok((0..grid_size)
        .map(|i| if i + 1 == grid_size { hi } else { lo + step * i as f64 })
        .collect())
}

/// Strength from the grid whose denoised output minimizes `score`; ties go
/// to the smallest strength.
pub fn select_sigma(
    x: &Image,
    spec: &DenoiserSpec,
    range: (f64, f64),
    grid_size: usize,
    mut score: impl FnMut(&Image) -> Result<f64>,
) -> Result<f64> {
    let grid = sigma_grid(range.0, range.1, grid_size)?;
    let mut best = (f64::INFINITY, grid[0]);
    for sigma in grid {
        let s = score(&denoise(&spec.with_sigma(sigma), x)?)?;
        if s < best.0 {
            best = (s, sigma);
        }
    }
    Ok(best.1)
}
