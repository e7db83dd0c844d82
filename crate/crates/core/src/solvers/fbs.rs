use super::{
    denoise_step, finish, landweber_step, IterationRecord, IterationTrace, Problem, SigmaUpdate,
    SolverConfig,
};
use crate::denoise::DenoiserSpec;
use crate::error::Result;
use crate::ops::{discrepancy, dist, dot, Image};

/// Momentum weights `alpha_k = (t_{k-1} - 1) / t_k` for `k = 1..=n`, with
/// `t_0 = 1` and `t_k = (1 + sqrt(1 + 4 t_{k-1}^2)) / 2`.
pub fn momentum_sequence(n: usize) -> Vec<f64> {
    let mut t = 1.0f64;
    (0..n)
        .map(|_| {
            let next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let alpha = (t - 1.0) / next;
            t = next;
            alpha
        })
        .collect()
}

/// Forward-backward splitting with a plug-in denoiser:
/// `x_k = z_{k-1} - tau grad D(z_{k-1})`, `z_k = H(x_k)` (attenuated as
/// configured).
pub fn fbs_pnp(problem: &Problem, denoiser: &DenoiserSpec, config: &SolverConfig) -> Result<IterationTrace> {
    run(problem, denoiser, config, false)
}

/// [`fbs_pnp`] followed by the extrapolation
/// `z_k <- z_k + alpha_k (z_k - z_{k-1})`, where the difference is taken
/// between consecutive denoised iterates.
pub fn fast_fbs_pnp(
    problem: &Problem,
    denoiser: &DenoiserSpec,
    config: &SolverConfig,
) -> Result<IterationTrace> {
    run(problem, denoiser, config, true)
}

fn run(problem: &Problem, denoiser: &DenoiserSpec, config: &SolverConfig, momentum: bool) -> Result<IterationTrace> {
    config.validate()?;
    denoiser.validate()?;
    let (a, b) = (problem.a_fit(), problem.b_fit());
    let tau = config.resolve_tau(config.estimate_norm_sq(a)?)?;
    let sigma = match config.sigma_update {
        SigmaUpdate::Fixed => denoiser.sigma,
        SigmaUpdate::Scaled => tau * denoiser.sigma,
    };
    let weights = if momentum { momentum_sequence(config.max_iters) } else { Vec::new() };

    let n = a.cols();
    // gradient point and the previous denoised iterate
    let mut z = vec![0.0; n];
    let mut z_prev_denoised = vec![0.0; n];
    let initial = discrepancy(a, &z, b)?;
    let mut records = Vec::with_capacity(config.max_iters);
    for k in 1..=config.max_iters {
        let step = landweber_step(a, &z, b, tau)?;
        let x: Vec<f64> = z.iter().zip(&step).map(|(p, q)| p + q).collect();
        let grad_step_norm = dist(&x, &z);
        let x_img = problem.image(x);

        let ds = denoise_step(problem, denoiser, config, &x_img, sigma, grad_step_norm)?;
        let d: Vec<f64> = ds.z.data().iter().zip(&z).map(|(p, q)| p - q).collect();

        let mut rec = IterationRecord {
            inner_product: dot(&d, &step),
            grad_step_norm,
            denoise_change: ds.change,
            alpha_used: ds.alpha,
            sigma_used: ds.sigma,
            ..IterationRecord::blank(k)
        };
        rec.observe(problem, ds.z.data(), &ds.z)?;

        z = if momentum {
            let w = weights[k - 1];
            let zd = ds.z.data();
            let next = zd
                .iter()
                .zip(&z_prev_denoised)
                .map(|(c, p)| c + w * (c - p))
                .collect();
            z_prev_denoised.copy_from_slice(zd);
            next
        } else {
            ds.z.data().to_vec()
        };
        if config.keep_iterates {
            rec.x = Some(x_img);
            rec.z = Some(ds.z);
        }
        records.push(rec);
    }
    let mut trace = IterationTrace::new(records, config.clone(), initial);
    trace.tau = Some(tau);
    finish(trace, problem)
}

/// Bound on `||z_k - y_k||` for a plain FBS-PnP trace against the Landweber
/// iterates `y_k` with the same step and start:
/// `sum_{i=0}^{k-1} (1 + tau ||A^T A||)^i c_{k-i}`, where `c_j` is the
/// change applied by the (attenuated) denoiser at step `j`.
pub fn cumulative_deviation_bound(trace: &IterationTrace, normal_norm: f64) -> Vec<f64> {
    let tau = trace.tau.unwrap_or(0.0);
    let growth = 1.0 + tau * normal_norm;
    let applied: Vec<f64> = trace.records.iter().map(|r| r.alpha_used * r.denoise_change).collect();
    let mut out = Vec::with_capacity(applied.len());
    let mut acc = 0.0;
    for c in applied {
        // bound_k = growth * bound_{k-1} + c_k
        acc = growth * acc + c;
        out.push(acc);
    }
    out
}

/// Landweber iterates `y_1..y_n` from zero with step `tau`.
pub fn landweber_iterates(problem: &Problem, tau: f64, n: usize) -> Result<Vec<Image>> {
    let (a, b) = (problem.a_fit(), problem.b_fit());
    let mut y = vec![0.0; a.cols()];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let step = landweber_step(a, &y, b, tau)?;
        y.iter_mut().zip(&step).for_each(|(p, q)| *p += q);
        out.push(problem.image(y.clone()));
    }
    Ok(out)
}
