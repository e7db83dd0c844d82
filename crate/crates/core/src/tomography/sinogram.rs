use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::ops::norm;

/// Measurement vector partitioned into a fit set and a cross-validation
/// leave-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    pub data: Vec<f64>,
    /// Sorted, disjoint from `cv_indices`; together they cover all rows.
    pub fit_indices: Vec<usize>,
    /// Sorted leave-out rows.
    pub cv_indices: Vec<usize>,
    /// Realized noise norm `||b - b_delta||_2`.
    pub noise_level_delta: f64,
}

impl Sinogram {
    /// Noise-free data with every row in the fit set.
    pub fn clean(data: Vec<f64>) -> Self {
        let m = data.len();
        Sinogram {
            data,
            fit_indices: (0..m).collect(),
            cv_indices: Vec::new(),
            noise_level_delta: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn fit_data(&self) -> Vec<f64> {
        self.fit_indices.iter().map(|&i| self.data[i]).collect()
    }

    pub fn cv_data(&self) -> Vec<f64> {
        self.cv_indices.iter().map(|&i| self.data[i]).collect()
    }

    /// SNR in dB, `20 log10(||b|| / delta)`, given the clean data norm.
    pub fn snr_db(&self, clean_norm: f64) -> f64 {
        20.0 * (clean_norm / self.noise_level_delta).log10()
    }
}

/// Adds seeded Gaussian noise scaled so that `||b_delta - b|| / ||b||`
/// equals `target_rel_err`.
pub fn add_noise(b: &[f64], target_rel_err: f64, seed: u64) -> Result<Sinogram> {
    if !(target_rel_err >= 0.0) || !target_rel_err.is_finite() {
        return Err(Error::invalid(format!(
            "target relative error must be >= 0, got {target_rel_err}"
        )));
    }
    let bn = norm(b);
    if bn == 0.0 {
        return Err(Error::invalid("cannot add relative noise to zero data"));
    }
    if target_rel_err == 0.0 {
        return Ok(Sinogram::clean(b.to_vec()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e: Vec<f64> = (0..b.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = target_rel_err * bn / norm(&e);
    let noise: Vec<f64> = e.iter().map(|v| scale * v).collect();
    let delta = norm(&noise);
    let data = b.iter().zip(&noise).map(|(x, n)| x + n).collect();
    Ok(Sinogram {
        noise_level_delta: delta,
        ..Sinogram::clean(data)
    })
}

/// Draws `round(fraction * m)` leave-out rows (round half up) uniformly
/// without replacement; the fit set is the complement.
pub fn split_cv(s: &Sinogram, fraction: f64, seed: u64) -> Result<Sinogram> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "cross-validation fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let m = s.len();
    let k = (fraction * m as f64 + 0.5).floor() as usize;
    if k == 0 || k >= m {
        return Err(Error::invalid(format!(
            "fraction {fraction} of {m} rows leaves an empty fit or leave-out set"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cv = index::sample(&mut rng, m, k).into_vec();
    cv.sort_unstable();
    let mut in_cv = vec![false; m];
    cv.iter().for_each(|&i| in_cv[i] = true);
    Ok(Sinogram {
        data: s.data.clone(),
        fit_indices: (0..m).filter(|&i| !in_cv[i]).collect(),
        cv_indices: cv,
        noise_level_delta: s.noise_level_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::dist;

    fn ramp(m: usize) -> Vec<f64> {
        (0..m).map(|i| (i as f64 * 0.37).sin() + 2.0).collect()
    }

    #[test]
    fn noiseless() {
        let b = ramp(50);
        let s = add_noise(&b, 0.0, 4).unwrap();
        assert_eq!(s.data, b);
        assert_eq!(s.noise_level_delta, 0.0);
    }

    #[test]
    fn relative_error_is_exact() {
        let b = ramp(500);
        let s = add_noise(&b, 0.01, 4).unwrap();
        let rel = dist(&s.data, &b) / norm(&b);
        assert!((rel - 0.01).abs() < 1e-14, "{rel}");
        assert!((s.noise_level_delta / norm(&b) - 0.01).abs() < 1e-15);
        assert!((s.snr_db(norm(&b)) - 40.0).abs() < 1e-9);
    }

    #[test]
    fn seeded_determinism() {
        let b = ramp(100);
        assert_eq!(add_noise(&b, 0.01, 7).unwrap(), add_noise(&b, 0.01, 7).unwrap());
        assert_ne!(add_noise(&b, 0.01, 7).unwrap().data, add_noise(&b, 0.01, 8).unwrap().data);
    }

    #[test]
    fn rejects_negative_target_and_zero_data() {
        assert!(add_noise(&ramp(10), -0.1, 0).is_err());
        assert!(add_noise(&[0.0; 5], 0.01, 0).is_err());
    }

    #[test]
    fn cv_sizes() {
        let s = Sinogram::clean(ramp(100));
        assert_eq!(split_cv(&s, 0.01, 1).unwrap().cv_indices.len(), 1);
        let s = Sinogram::clean(ramp(8064));
        assert_eq!(split_cv(&s, 0.01, 1).unwrap().cv_indices.len(), 81);
    }

    #[test]
    fn cv_partition() {
        let s = Sinogram::clean(ramp(300));
        let p = split_cv(&s, 0.1, 3).unwrap();
        let mut all: Vec<usize> = p.fit_indices.iter().chain(&p.cv_indices).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..300).collect::<Vec<_>>());
        assert_eq!(p.cv_indices.len(), 30);
        assert_eq!(p.fit_indices.len(), 270);
    }

    #[test]
    fn cv_rejects_degenerate_fractions() {
        let s = Sinogram::clean(ramp(10));
        assert!(split_cv(&s, 0.0, 1).is_err());
        assert!(split_cv(&s, 1.0, 1).is_err());
        assert!(split_cv(&s, 0.01, 1).is_err()); // rounds to zero rows
        assert!(split_cv(&s, 0.97, 1).is_err()); // rounds to all rows
    }
}
