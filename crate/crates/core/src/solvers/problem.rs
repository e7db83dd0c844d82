use crate::error::{check_len, Error, Result};
use crate::ops::{Image, SparseOperator};
use crate::tomography::Sinogram;

/// A linear inverse problem: fit rows, optional leave-out rows, optional
/// ground truth and the noise level of the data.
#[derive(Debug, Clone)]
pub struct Problem {
    a_fit: SparseOperator,
    b_fit: Vec<f64>,
    cv: Option<(SparseOperator, Vec<f64>)>,
    truth: Option<Image>,
    width: usize,
    height: usize,
    delta: f64,
}

impl Problem {
    /// Unknown is a `width x height` image.
    pub fn new(a_fit: SparseOperator, b_fit: Vec<f64>, width: usize, height: usize) -> Result<Self> {
        check_len("Problem: b_fit", a_fit.rows(), b_fit.len())?;
        check_len("Problem: image size", a_fit.cols(), width * height)?;
        if a_fit.rows() == 0 {
            return Err(Error::invalid("problem has no fit rows"));
        }
        Ok(Problem {
            a_fit,
            b_fit,
            cv: None,
            truth: None,
            width,
            height,
            delta: 0.0,
        })
    }

    /// Splits `a` and the sinogram by its fit and leave-out index sets.
    pub fn from_sinogram(a: &SparseOperator, s: &Sinogram, width: usize, height: usize) -> Result<Self> {
        check_len("Problem: sinogram", a.rows(), s.len())?;
        let p = Problem::new(a.select_rows(&s.fit_indices)?, s.fit_data(), width, height)?
            .with_noise_level(s.noise_level_delta)?;
        if s.cv_indices.is_empty() {
            Ok(p)
        } else {
            p.with_cv(a.select_rows(&s.cv_indices)?, s.cv_data())
        }
    }

    pub fn with_cv(mut self, a_cv: SparseOperator, b_cv: Vec<f64>) -> Result<Self> {
        check_len("Problem: b_cv", a_cv.rows(), b_cv.len())?;
        check_len("Problem: cv columns", self.a_fit.cols(), a_cv.cols())?;
        self.cv = Some((a_cv, b_cv));
        Ok(self)
    }

    pub fn with_truth(mut self, truth: Image) -> Result<Self> {
        if truth.width() != self.width || truth.height() != self.height {
            return Err(Error::invalid("truth image does not match the problem shape"));
        }
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn with_noise_level(mut self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::invalid(format!("noise level must be >= 0, got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn a_fit(&self) -> &SparseOperator {
        &self.a_fit
    }

    pub fn b_fit(&self) -> &[f64] {
        &self.b_fit
    }

    pub fn cv(&self) -> Option<(&SparseOperator, &[f64])> {
        self.cv.as_ref().map(|(a, b)| (a, b.as_slice()))
    }

    pub fn truth(&self) -> Option<&Image> {
        self.truth.as_ref()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Noise level `delta` of the full data.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn image(&self, data: Vec<f64>) -> Image {
        Image::new(self.width, self.height, data).expect("problem-sized buffer")
    }
}
