use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{dot, SparseOperator};
use crate::error::{Error, Result};

/// Estimates `||A||_2^2` by power iteration on `A^T A` from a seeded
/// Gaussian start vector.
///
/// The returned value is the Rayleigh quotient `||A v||^2` of the final unit
/// iterate, which never exceeds the true largest eigenvalue of `A^T A` and is
/// nondecreasing in `iters`.
pub fn power_iteration_norm_sq(a: &SparseOperator, iters: usize, seed: u64) -> Result<f64> {
    if iters == 0 {
        return Err(Error::invalid("power iteration needs iters >= 1"));
    }
    if a.cols() == 0 || a.nnz() == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..a.cols()).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);

    let mut estimate = 0.0;
    for _ in 0..iters {
        let av = a.apply(&v)?;
        estimate = dot(&av, &av);
        let mut w = a.apply_adjoint(&av)?;
        if normalize(&mut w) == 0.0 {
            // start vector in the null space
            return Ok(estimate);
        }
        v = w;
    }
    let av = a.apply(&v)?;
    Ok(estimate.max(dot(&av, &av)))
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}
