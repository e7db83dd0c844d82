use std::str::FromStr;

use super::attenuation::default_alpha_grid;
use crate::error::{Error, Result};
use crate::ops::{power_iteration_norm_sq, DEFAULT_CG_TOL};
use crate::selection::{CriterionKind, DEFAULT_ETA};

/// Automatic step size as a fraction of the bound `1 / (2 ||A||^2)`.
pub const STEP_SAFETY: f64 = 0.95;

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub fn name(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(
                        "unknown {} `{s}` (expected one of: {})",
                        stringify!($name),
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum!(Algorithm {
    Landweber => "landweber",
    FbsPnp => "fbs_pnp",
    FastFbsPnp => "fast_fbs_pnp",
    AdmmPnp => "admm_pnp",
});

named_enum!(
    /// `Scaled` uses `tau * sigma` (FBS) or `sigma / rho` (ADMM).
    SigmaUpdate {
        Fixed => "fixed",
        Scaled => "scaled",
    }
);

named_enum!(Attenuation {
    None => "none",
    Gamma => "gamma",
    SelectAlpha => "select_alpha",
});

named_enum!(
    /// Regularizer `L` of the first ADMM x-update.
    FirstIterate {
        Identity => "identity",
        GradMagnitude => "grad_magnitude",
    }
);

/// Per-iteration search over denoiser strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSearch {
    pub min: f64,
    pub max: f64,
    pub grid_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub max_iters: usize,
    /// Gradient step; `None` picks [`STEP_SAFETY`] times the bound.
    pub tau: Option<f64>,
    pub rho: f64,
    pub sigma_update: SigmaUpdate,
    pub attenuation: Attenuation,
    pub gamma: f64,
    pub alpha_grid: Vec<f64>,
    pub inner_cg_iters: usize,
    pub cg_tol: f64,
    pub cg_warm_start: bool,
    pub first_iterate: FirstIterate,
    /// Power iterations used to estimate `||A||^2`.
    pub power_iters: usize,
    pub seed: u64,
    pub sigma_search: Option<SigmaSearch>,
    /// Score used by `select_alpha` and `sigma_search`.
    pub criterion: CriterionKind,
    pub eta: f64,
    /// Store `x` and `z` images in every record.
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Landweber,
            max_iters: 100,
            tau: None,
            rho: 1.0,
            sigma_update: SigmaUpdate::Fixed,
            attenuation: Attenuation::None,
            gamma: 0.5,
            alpha_grid: default_alpha_grid(),
            inner_cg_iters: 100,
            cg_tol: DEFAULT_CG_TOL,
            cg_warm_start: false,
            first_iterate: FirstIterate::Identity,
            power_iters: 100,
            seed: 0,
            sigma_search: None,
            criterion: CriterionKind::CrossValidation,
            eta: DEFAULT_ETA,
            keep_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, max_iters: usize) -> Self {
        SolverConfig {
            algorithm,
            max_iters,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid(msg));
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1".into());
        }
        if let Some(t) = self.tau {
            if !(t > 0.0) || !t.is_finite() {
                return bad(format!("tau must be > 0, got {t}"));
            }
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return bad(format!("rho must be > 0, got {}", self.rho));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if self.alpha_grid.is_empty() || self.alpha_grid.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return bad("alpha grid must be nonempty with values in (0, 1]".into());
        }
        if self.inner_cg_iters == 0 {
            return bad("inner_cg_iters must be >= 1".into());
        }
        if !(self.cg_tol >= 0.0) {
            return bad(format!("cg_tol must be >= 0, got {}", self.cg_tol));
        }
        if self.power_iters == 0 {
            return bad("power_iters must be >= 1".into());
        }
        if !(self.eta > 1.0) {
            return bad(format!("eta must be > 1, got {}", self.eta));
        }
        if let Some(s) = self.sigma_search {
            if !(s.min >= 0.0 && s.max >= s.min) || s.grid_size < 2 {
                return bad(format!("invalid sigma search {s:?}"));
            }
        }
        Ok(())
    }

    /// Step size for gradient-based algorithms, checked against the bound
    /// `tau < 1 / (2 ||A||^2)` with the norm estimated by power iteration.
    pub(crate) fn resolve_tau(&self, norm_sq: f64) -> Result<f64> {
        if norm_sq == 0.0 {
            return Ok(self.tau.unwrap_or(1.0));
        }
        let bound = 1.0 / (2.0 * norm_sq);
        match self.tau {
            None => Ok(STEP_SAFETY * bound),
            Some(t) if t < bound => Ok(t),
            Some(t) => Err(Error::invalid(format!(
                "step size {t} violates the bound 1/(2||A||^2) = {bound}"
            ))),
        }
    }

    pub(crate) fn estimate_norm_sq(&self, a: &crate::ops::SparseOperator) -> Result<f64> {
        power_iteration_norm_sq(a, self.power_iters, self.seed)
    }
}
