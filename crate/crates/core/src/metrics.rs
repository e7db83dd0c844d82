//! Reconstruction quality measures against a known truth image, and the
//! relative data residuals.

use crate::error::{check_len, Error, Result};
use crate::ops::{dist, norm, Image, SparseOperator};
use crate::selection::relative_residual;

/// Reported PSNR for an exact match.
pub const PSNR_SATURATION_DB: f64 = 300.0;

const SSIM_WINDOW_RADIUS: usize = 5;
const SSIM_WINDOW_STD: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub d_err: f64,
    pub s_err: f64,
}

fn check_shapes(x: &Image, truth: &Image) -> Result<()> {
    if !x.same_shape(truth) {
        return Err(Error::invalid(format!(
            "image is {}x{} but truth is {}x{}",
            x.width(),
            x.height(),
            truth.width(),
            truth.height()
        )));
    }
    Ok(())
}

/// `||x - truth|| / ||truth||`
pub fn rel_mse(x: &Image, truth: &Image) -> Result<f64> {
    check_shapes(x, truth)?;
    let tn = norm(truth.data());
    if tn == 0.0 {
        return Err(Error::invalid("relative error against a zero truth image"));
    }
    Ok(dist(x.data(), truth.data()) / tn)
}

/// `10 log10(peak^2 / mean((x - truth)^2))` with `peak = max(truth)`,
/// capped at [`PSNR_SATURATION_DB`].
pub fn psnr(x: &Image, truth: &Image) -> Result<f64> {
    check_shapes(x, truth)?;
    let mse = dist(x.data(), truth.data()).powi(2) / truth.len() as f64;
    let peak = truth.max();
    if mse == 0.0 {
        return Ok(PSNR_SATURATION_DB);
    }
    Ok((10.0 * (peak * peak / mse).log10()).min(PSNR_SATURATION_DB))
}

/// Maps an image onto `[0, 1]`; a constant image maps to zeros.
fn unit_range(x: &Image) -> Image {
    let (lo, hi) = (x.min(), x.max());
    if hi > lo {
        x.map(|v| (v - lo) / (hi - lo))
    } else {
        x.map(|_| 0.0)
    }
}

/// Separable "valid" filtering: output is `(w - 2r) x (h - 2r)`.
fn filter_valid(data: &[f64], w: usize, h: usize, k: &[f64]) -> Vec<f64> {
    let kl = k.len();
    let (ow, oh) = (w + 1 - kl, h + 1 - kl);
    let mut tmp = vec![0.0; ow * h];
    for r in 0..h {
        for c in 0..ow {
            tmp[r * ow + c] = k.iter().enumerate().map(|(t, kv)| kv * data[r * w + c + t]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = k.iter().enumerate().map(|(t, kv)| kv * tmp[(r + t) * ow + c]).sum();
        }
    }
    out
}

/// Structural similarity on range-normalized images: 11x11 Gaussian window
/// (std 1.5), `K1 = 0.01`, `K2 = 0.03`, dynamic range 1, averaged over all
/// fully contained windows.
pub fn ssim(x: &Image, truth: &Image) -> Result<f64> {
    check_shapes(x, truth)?;
    let side = 2 * SSIM_WINDOW_RADIUS + 1;
    if x.width() < side || x.height() < side {
        return Err(Error::invalid(format!("SSIM needs images of at least {side}x{side}")));
    }
    if !(truth.max() > truth.min()) {
        return Err(Error::DegenerateImage("ssim truth"));
    }
    let (a, b) = (unit_range(x), unit_range(truth));
    let (w, h) = (x.width(), x.height());
    let r = SSIM_WINDOW_RADIUS as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * SSIM_WINDOW_STD * SSIM_WINDOW_STD)).exp())
        .collect();
    let ks: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= ks);

    let prod = |p: &[f64], q: &[f64]| -> Vec<f64> { p.iter().zip(q).map(|(u, v)| u * v).collect() };
    let mu_a = filter_valid(a.data(), w, h, &k);
    let mu_b = filter_valid(b.data(), w, h, &k);
    let aa = filter_valid(&prod(a.data(), a.data()), w, h, &k);
    let bb = filter_valid(&prod(b.data(), b.data()), w, h, &k);
    let ab = filter_valid(&prod(a.data(), b.data()), w, h, &k);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    Ok(total / mu_a.len() as f64)
}

/// Relative residual on the fit rows.
pub fn d_err(a_fit: &SparseOperator, b_fit: &[f64], x: &[f64]) -> Result<f64> {
    relative_residual(a_fit, b_fit, x)
}

/// Relative residual on the leave-out rows.
pub fn s_err(a_cv: &SparseOperator, b_cv: &[f64], x: &[f64]) -> Result<f64> {
    relative_residual(a_cv, b_cv, x)
}

impl MetricsReport {
    /// Full report for `x`. Data errors are `NaN` when the corresponding
    /// rows are absent.
    pub fn evaluate(
        x: &Image,
        truth: &Image,
        fit: (&SparseOperator, &[f64]),
        cv: Option<(&SparseOperator, &[f64])>,
    ) -> Result<Self> {
        check_len("metrics: x", fit.0.cols(), x.len())?;
        Ok(MetricsReport {
            mse: rel_mse(x, truth)?,
            psnr: psnr(x, truth)?,
            ssim: ssim(x, truth)?,
            d_err: d_err(fit.0, fit.1, x.data())?,
            s_err: match cv {
                Some((a, b)) => s_err(a, b, x.data())?,
                None => f64::NAN,
            },
        })
    }
}
