//! Iterative solvers: Landweber, FBS-PnP (plain and accelerated) and
//! ADMM-PnP, with per-iteration monitoring.

mod admm;
mod attenuation;
mod config;
mod fbs;
mod landweber;
mod problem;
mod trace;

pub use admm::admm_pnp;
pub use attenuation::{
    attenuate_gamma, attenuate_select, blend, default_alpha_grid, select_sigma, sigma_grid,
};
pub use config::{
    Algorithm, Attenuation, FirstIterate, SigmaSearch, SigmaUpdate, SolverConfig, STEP_SAFETY,
};
pub use fbs::{
    cumulative_deviation_bound, fast_fbs_pnp, fbs_pnp, landweber_iterates, momentum_sequence,
};
pub use landweber::{landweber, landweber_step};
pub use problem::Problem;
pub use trace::{IterationRecord, IterationTrace};

use crate::denoise::{denoise, DenoiserSpec};
use crate::error::Result;
use crate::ops::{dist, Image};
use crate::selection::{default_corridor, evaluate_criterion};

/// Runs the algorithm named in `config`. Landweber ignores the denoiser.
pub fn run_solver(
    problem: &Problem,
    denoiser: &DenoiserSpec,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    match config.algorithm {
        Algorithm::Landweber => landweber(problem, config),
        Algorithm::FbsPnp => fbs_pnp(problem, denoiser, config),
        Algorithm::FastFbsPnp => fast_fbs_pnp(problem, denoiser, config),
        Algorithm::AdmmPnp => admm_pnp(problem, denoiser, config),
    }
}

/// Denoised and attenuated iterate.
struct DenoiseStep {
    z: Image,
    alpha: f64,
    change: f64,
    sigma: f64,
}

/// `H(v)` at strength `sigma` (or a searched strength), then the configured
/// attenuation. `step_norm` is the data-step length the gamma rule compares
/// against.
fn denoise_step(
    problem: &Problem,
    spec: &DenoiserSpec,
    config: &SolverConfig,
    v: &Image,
    sigma: f64,
    step_norm: f64,
) -> Result<DenoiseStep> {
    let score = |z: &Image| evaluate_criterion(config.criterion, problem, z.data());
    let sigma = match config.sigma_search {
        Some(s) => select_sigma(v, spec, (s.min, s.max), s.grid_size, score)?,
        None => sigma,
    };
    let hv = denoise(&spec.with_sigma(sigma), v)?;
    let change = dist(hv.data(), v.data());
    let (z, alpha) = match config.attenuation {
        Attenuation::None => (hv, 1.0),
        Attenuation::Gamma => attenuate_gamma(v, &hv, step_norm, config.gamma),
        Attenuation::SelectAlpha => attenuate_select(v, &hv, &config.alpha_grid, score)?,
    };
    Ok(DenoiseStep {
        z,
        alpha,
        change,
        sigma,
    })
}

fn finish(mut trace: IterationTrace, problem: &Problem) -> Result<IterationTrace> {
    trace.classify(&default_corridor(problem.delta())?);
    Ok(trace)
}
