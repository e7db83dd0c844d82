use super::{finish, IterationRecord, IterationTrace, Problem, SolverConfig};
use crate::error::Result;
use crate::ops::{axpy, discrepancy, dot, grad_ls, norm, SparseOperator};

/// The update `-tau * grad D(x)`.
pub fn landweber_step(a: &SparseOperator, x: &[f64], b: &[f64], tau: f64) -> Result<Vec<f64>> {
    let mut g = grad_ls(a, x, b)?;
    g.iter_mut().for_each(|v| *v *= -tau);
    Ok(g)
}

/// Gradient descent on `||Ax - b||^2` from `x = 0`:
/// `x_k = x_{k-1} - tau * 2 A^T (A x_{k-1} - b)`.
pub fn landweber(problem: &Problem, config: &SolverConfig) -> Result<IterationTrace> {
    config.validate()?;
    let (a, b) = (problem.a_fit(), problem.b_fit());
    let tau = config.resolve_tau(config.estimate_norm_sq(a)?)?;

    let mut x = vec![0.0; a.cols()];
    let initial = discrepancy(a, &x, b)?;
    let mut records = Vec::with_capacity(config.max_iters);
    for k in 1..=config.max_iters {
        let step = landweber_step(a, &x, b, tau)?;
        axpy(1.0, &step, &mut x);

        let img = problem.image(x.clone());
        let mut rec = IterationRecord {
            inner_product: dot(&step, &step),
            grad_step_norm: norm(&step),
            ..IterationRecord::blank(k)
        };
        rec.observe(problem, &x, &img)?;
        if config.keep_iterates {
            rec.x = Some(img.clone());
            rec.z = Some(img);
        }
        records.push(rec);
    }
    let mut trace = IterationTrace::new(records, config.clone(), initial);
    trace.tau = Some(tau);
    finish(trace, problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Algorithm;

    #[test]
    fn identity_reaches_data_in_one_step() {
        let b = vec![1.0, -2.0, 0.5, 3.0];
        let a = SparseOperator::identity(4);
        let x1 = landweber_step(&a, &[0.0; 4], &b, 0.5).unwrap();
        assert_eq!(x1, b);
        // tau = 0.5 sits on the bound for ||A|| = 1, so a run must stay below it
        let p = Problem::new(a, b.clone(), 2, 2).unwrap();
        let cfg = SolverConfig {
            tau: Some(0.45),
            ..SolverConfig::new(Algorithm::Landweber, 1)
        };
        let t = landweber(&p, &cfg).unwrap();
        assert!((t.records[0].discrepancy - 0.01 * 14.25).abs() < 1e-12);
    }

    #[test]
    fn discrepancy_is_monotone_on_consistent_data() {
        let dense: Vec<f64> = (0..30).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let a = SparseOperator::from_dense(6, 5, &dense).unwrap();
        let b = a.apply(&[1.0, 0.0, -1.0, 2.0, 0.5]).unwrap();
        let p = Problem::new(a, b, 5, 1).unwrap();
        let t = landweber(&p, &SolverConfig::new(Algorithm::Landweber, 200)).unwrap();
        let d = t.series(|r| r.discrepancy);
        assert!(t.initial_discrepancy >= d[0]);
        assert!(d.windows(2).all(|w| w[1] <= w[0]));
        assert!(t.records.iter().all(|r| r.inner_product > 0.0 || r.grad_step_norm == 0.0));
    }

    #[test]
    fn step_bound_enforced() {
        let p = Problem::new(SparseOperator::diag(&[2.0, 1.0]), vec![1.0, 1.0], 2, 1).unwrap();
        let cfg = SolverConfig {
            tau: Some(0.2),
            ..SolverConfig::new(Algorithm::Landweber, 3)
        };
        assert!(landweber(&p, &cfg).is_err());
    }
}
