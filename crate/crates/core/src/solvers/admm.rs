use super::{
    denoise_step, finish, FirstIterate, IterationRecord, IterationTrace, Problem, SigmaUpdate,
    SolverConfig,
};
use crate::denoise::DenoiserSpec;
use crate::error::{Error, Result};
use crate::ops::{axpy, cg_solve_from, discrepancy, dot, grad_ls, norm, SparseOperator};

/// ADMM with a plug-in denoiser, from `x = z = u = 0`:
///
/// - `x_{k+1}` solves `(A^T A + rho I) x = A^T b + rho (z_k - u_k)` by CG;
/// - `z_{k+1} = H(x_{k+1} + u_k)`, at strength `sigma / rho` when scaled;
/// - `u_{k+1} = u_k + x_{k+1} - z_{k+1}`.
///
/// With [`FirstIterate::GradMagnitude`] the first x-update solves
/// `(A^T A + rho G^T G) x = A^T b` with the forward-difference gradient `G`
/// instead. The monitored direction is `x_{k+1} - x_k` against
/// `-grad D(x_k)`; metrics are taken on `z`.
pub fn admm_pnp(problem: &Problem, denoiser: &DenoiserSpec, config: &SolverConfig) -> Result<IterationTrace> {
    config.validate()?;
    denoiser.validate()?;
    let (a, b) = (problem.a_fit(), problem.b_fit());
    let rho = config.rho;
    let sigma = match config.sigma_update {
        SigmaUpdate::Fixed => denoiser.sigma,
        SigmaUpdate::Scaled => denoiser.sigma / rho,
    };
    let n = a.cols();
    let identity = SparseOperator::identity(n);
    let gradient = match config.first_iterate {
        FirstIterate::Identity => None,
        FirstIterate::GradMagnitude => Some(SparseOperator::gradient_2d(problem.width(), problem.height())),
    };
    let atb = a.apply_adjoint(b)?;

    let mut x = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut u = vec![0.0; n];
    let initial = discrepancy(a, &x, b)?;
    let mut records: Vec<IterationRecord> = Vec::with_capacity(config.max_iters);
    for k in 1..=config.max_iters {
        let mut rhs = atb.clone();
        let zu: Vec<f64> = z.iter().zip(&u).map(|(p, q)| p - q).collect();
        axpy(rho, &zu, &mut rhs);
        let l = match (&gradient, k) {
            (Some(g), 1) => g,
            _ => &identity,
        };
        let start = config.cg_warm_start.then_some(x.as_slice());
        let (x_next, report) = cg_solve_from(a, l, rho, &rhs, start, config.inner_cg_iters, config.cg_tol)?;
        if report.breakdown && !report.converged {
            return Err(Error::SolverAbort {
                iteration: k,
                report,
                partial: Box::new(IterationTrace::new(records, config.clone(), initial)),
            });
        }

        let neg_grad: Vec<f64> = grad_ls(a, &x, b)?.iter().map(|g| -g).collect();
        let d: Vec<f64> = x_next.iter().zip(&x).map(|(p, q)| p - q).collect();
        let v = problem.image(x_next.iter().zip(&u).map(|(p, q)| p + q).collect());
        let grad_norm = norm(&neg_grad);
        let ds = denoise_step(problem, denoiser, config, &v, sigma, grad_norm)?;

        let mut rec = IterationRecord {
            inner_product: dot(&d, &neg_grad),
            grad_step_norm: grad_norm,
            denoise_change: ds.change,
            alpha_used: ds.alpha,
            sigma_used: ds.sigma,
            ..IterationRecord::blank(k)
        };
        rec.observe(problem, &x_next, &ds.z)?;

        for ((ui, xi), zi) in u.iter_mut().zip(&x_next).zip(ds.z.data()) {
            *ui += xi - zi;
        }
        z.copy_from_slice(ds.z.data());
        x = x_next;
        if config.keep_iterates {
            rec.x = Some(problem.image(x.clone()));
            rec.z = Some(ds.z);
        }
        records.push(rec);
    }
    finish(IterationTrace::new(records, config.clone(), initial), problem)
}
