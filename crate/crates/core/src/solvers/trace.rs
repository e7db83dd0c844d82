use super::{Problem, SolverConfig};
use crate::error::Result;
use crate::metrics::{psnr, rel_mse, ssim};
use crate::ops::{discrepancy, Image};
use crate::selection::{relative_residual, Corridor, Family};

/// What was observed at iteration `k` (1-based).
///
/// `discrepancy` is `||Ax - b||^2` on the fit rows for the monitored
/// iterate; quality metrics refer to the reported (denoised) iterate and
/// are `NaN` when the corresponding data are unavailable.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub x: Option<Image>,
    pub z: Option<Image>,
    /// `<d_k, -grad D>` for the step taken.
    pub inner_product: f64,
    pub grad_step_norm: f64,
    /// `||H(x) - x||` before attenuation.
    pub denoise_change: f64,
    pub alpha_used: f64,
    pub sigma_used: f64,
    pub discrepancy: f64,
    pub cv_error: f64,
    pub mse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub d_err: f64,
}

impl IterationRecord {
    pub fn blank(k: usize) -> Self {
        IterationRecord {
            k,
            x: None,
            z: None,
            inner_product: 0.0,
            grad_step_norm: 0.0,
            denoise_change: 0.0,
            alpha_used: 1.0,
            sigma_used: 0.0,
            discrepancy: f64::NAN,
            cv_error: f64::NAN,
            mse: f64::NAN,
            psnr: f64::NAN,
            ssim: f64::NAN,
            d_err: f64::NAN,
        }
    }

    /// Fills the data and quality fields. `monitored` feeds `discrepancy`,
    /// `reported` everything else.
    pub(crate) fn observe(&mut self, problem: &Problem, monitored: &[f64], reported: &Image) -> Result<()> {
        let (a, b) = (problem.a_fit(), problem.b_fit());
        self.discrepancy = discrepancy(a, monitored, b)?;
        self.d_err = relative_residual(a, b, reported.data())?;
        if let Some((a_cv, b_cv)) = problem.cv() {
            self.cv_error = relative_residual(a_cv, b_cv, reported.data())?;
        }
        if let Some(truth) = problem.truth() {
            self.mse = rel_mse(reported, truth)?;
            self.psnr = psnr(reported, truth)?;
            if truth.width() >= 11 && truth.height() >= 11 {
                self.ssim = ssim(reported, truth)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub config: SolverConfig,
    pub family_label: Family,
    /// Discrepancy of the starting point.
    pub initial_discrepancy: f64,
    /// Gradient step used, for algorithms that take one.
    pub tau: Option<f64>,
}

impl IterationTrace {
    pub fn new(records: Vec<IterationRecord>, config: SolverConfig, initial_discrepancy: f64) -> Self {
        IterationTrace {
            records,
            config,
            family_label: Family::Unclassified,
            initial_discrepancy,
            tau: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, k: usize) -> Option<&IterationRecord> {
        self.records.iter().find(|r| r.k == k)
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// Recomputes `family_label` for `corridor`.
    pub fn classify(&mut self, corridor: &Corridor) -> Family {
        self.family_label = crate::selection::classify_family(self, corridor);
        self.family_label
    }

    /// One record field across the trace.
    pub fn series(&self, f: impl Fn(&IterationRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }
}
