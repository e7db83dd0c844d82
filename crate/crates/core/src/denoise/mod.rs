//! Denoisers `H_sigma` and the range-rescaling wrapper.

mod gaussian;
mod median;
mod tv;

pub use gaussian::{gaussian_kernel, gaussian_smooth, kernel_std};
pub use median::median_filter;
pub use tv::{total_variation, tv_prox, DEFAULT_TV_INNER_ITERS};

use crate::error::{Error, Result};
use crate::ops::{dist, Image};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DenoiserKind {
    Identity,
    Gaussian,
    /// Odd square window, one pass.
    Median { window: usize },
    /// Isotropic TV prox with `lambda = sigma`.
    TvProx { inner_iters: usize },
}

impl DenoiserKind {
    pub fn name(&self) -> &'static str {
        match self {
            DenoiserKind::Identity => "identity",
            DenoiserKind::Gaussian => "gaussian",
            DenoiserKind::Median { .. } => "median",
            DenoiserKind::TvProx { .. } => "tv_prox",
        }
    }
}

/// A denoiser with its strength. `sigma == 0` is the identity for every
/// kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiserSpec {
    pub kind: DenoiserKind,
    pub sigma: f64,
    /// Map the input to `[0, 1]` before denoising and back afterwards.
    pub rescale_wrap: bool,
}

impl DenoiserSpec {
    pub fn identity() -> Self {
        DenoiserSpec {
            kind: DenoiserKind::Identity,
            sigma: 0.0,
            rescale_wrap: false,
        }
    }

    pub fn gaussian(sigma: f64) -> Self {
        DenoiserSpec {
            kind: DenoiserKind::Gaussian,
            sigma,
            rescale_wrap: false,
        }
    }

    pub fn median(sigma: f64, window: usize) -> Self {
        DenoiserSpec {
            kind: DenoiserKind::Median { window },
            sigma,
            rescale_wrap: false,
        }
    }

    pub fn tv_prox(sigma: f64, inner_iters: usize) -> Self {
        DenoiserSpec {
            kind: DenoiserKind::TvProx { inner_iters },
            sigma,
            rescale_wrap: false,
        }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        DenoiserSpec { sigma, ..self }
    }

    pub fn wrapped(self, rescale_wrap: bool) -> Self {
        DenoiserSpec {
            rescale_wrap,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::invalid(format!("denoiser sigma must be >= 0, got {}", self.sigma)));
        }
        match self.kind {
            DenoiserKind::Median { window } if window == 0 || window % 2 == 0 => Err(
                Error::invalid(format!("median window must be odd and >= 1, got {window}")),
            ),
            DenoiserKind::TvProx { inner_iters: 0 } => {
                Err(Error::invalid("tv_prox needs at least one inner iteration"))
            }
            _ => Ok(()),
        }
    }

    /// `H_sigma` without the wrapper.
    fn apply_inner(&self, x: &Image) -> Result<Image> {
        if self.sigma == 0.0 {
            return Ok(x.clone());
        }
        match self.kind {
            DenoiserKind::Identity => Ok(x.clone()),
            DenoiserKind::Gaussian => Ok(gaussian_smooth(x, kernel_std(self.sigma))),
            DenoiserKind::Median { window } => Ok(median_filter(x, window)),
            DenoiserKind::TvProx { inner_iters } => tv_prox(x, self.sigma, inner_iters),
        }
    }
}

/// Applies the denoiser, through the rescale wrapper when the spec asks.
pub fn denoise(spec: &DenoiserSpec, x: &Image) -> Result<Image> {
    spec.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite("denoiser input"));
    }
    if spec.rescale_wrap {
        rescale_wrap(spec, x)
    } else {
        spec.apply_inner(x)
    }
}

/// `S^{-1}(H(S(x)))` with `S(x) = (x - min) / (max - min)`. A constant image
/// has no range to normalize and goes straight through `H`.
pub fn rescale_wrap(spec: &DenoiserSpec, x: &Image) -> Result<Image> {
    spec.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite("denoiser input"));
    }
    let (lo, hi) = (x.min(), x.max());
    let span = hi - lo;
    if !(span > 0.0) {
        log::debug!("rescale wrapper bypassed on a constant image");
        return spec.apply_inner(x);
    }
    let scaled = x.map(|v| (v - lo) / span);
    let y = spec.apply_inner(&scaled)?;
    Ok(y.map(|v| span * v + lo))
}

/// `||H(x) - x||_2`
pub fn denoise_strength(spec: &DenoiserSpec, x: &Image) -> Result<f64> {
    let hx = denoise(spec, x)?;
    Ok(dist(hx.data(), x.data()))
}

/// Reflective (half-sample symmetric) index into `0..n`.
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = i.rem_euclid(2 * n);
    (if m >= n { 2 * n - 1 - m } else { m }) as usize
}
