//! Ray-driven discretization of the Radon transform.
//!
//! The image grid occupies `[-n/2, n/2]^2` in pixel units, one unit per
//! pixel. Pixel `(i, j)` (row, column) covers
//! `x in [-n/2 + j, -n/2 + j + 1]`, `y in [n/2 - i - 1, n/2 - i]`, so row 0
//! is the top of the image. Each ray is a segment and the operator entry for
//! `(ray, pixel)` is the length of the segment inside the pixel, found by
//! walking the sorted plane crossings (Siddon).

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::ops::SparseOperator;

/// Intersections shorter than this are dropped.
pub const MIN_INTERSECTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Parallel,
    FanCurved,
}

/// Acquisition geometry. Radii are in pixel units and only used by the fan
/// geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub n_angles: usize,
    pub n_rays_per_angle: usize,
    pub angle_span_degrees: f64,
    pub source_radius: f64,
    pub detector_radius: f64,
}

impl Geometry {
    pub fn parallel(n_angles: usize, n_rays_per_angle: usize, angle_span_degrees: f64) -> Self {
        Geometry {
            kind: GeometryKind::Parallel,
            n_angles,
            n_rays_per_angle,
            angle_span_degrees,
            source_radius: 0.0,
            detector_radius: 0.0,
        }
    }

    /// Curved-detector fan beam with source and detector radii `2n`.
    pub fn fan_curved(n: usize, n_angles: usize, n_rays_per_angle: usize, span: f64) -> Self {
        Geometry {
            kind: GeometryKind::FanCurved,
            n_angles,
            n_rays_per_angle,
            angle_span_degrees: span,
            source_radius: 2.0 * n as f64,
            detector_radius: 2.0 * n as f64,
        }
    }

    /// 30 parallel views over 180 degrees, 95 rays each.
    pub fn desk() -> Self {
        Self::parallel(30, 95, 180.0)
    }

    pub fn n_rays(&self) -> usize {
        self.n_angles * self.n_rays_per_angle
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 16 {
            return Err(Error::invalid(format!("grid needs n >= 16, got {n}")));
        }
        if self.n_angles < 1 || self.n_rays_per_angle < 1 {
            return Err(Error::invalid("geometry needs at least one angle and one ray"));
        }
        if !(self.angle_span_degrees > 0.0 && self.angle_span_degrees <= 360.0) {
            return Err(Error::invalid(format!(
                "angle span must lie in (0, 360], got {}",
                self.angle_span_degrees
            )));
        }
        if self.kind == GeometryKind::FanCurved {
            let circumradius = n as f64 / SQRT_2;
            if !(self.source_radius > circumradius) {
                return Err(Error::invalid(format!(
                    "fan source radius {} must exceed the grid circumradius {circumradius}",
                    self.source_radius
                )));
            }
            if !(self.detector_radius > 0.0) {
                return Err(Error::invalid("fan detector radius must be positive"));
            }
        }
        Ok(())
    }

    /// Ray segments in sinogram order (angle-major).
    pub fn rays(&self, n: usize) -> Vec<([f64; 2], [f64; 2])> {
        let nf = n as f64;
        let p = self.n_rays_per_angle;
        let centered = |r: usize| r as f64 - (p as f64 - 1.0) / 2.0;
        let mut out = Vec::with_capacity(self.n_rays());
        for a in 0..self.n_angles {
            let theta = (a as f64 * self.angle_span_degrees / self.n_angles as f64).to_radians();
            let (s, c) = theta.sin_cos();
            match self.kind {
                GeometryKind::Parallel => {
                    // detector spans the grid diagonal
                    let spacing = if p > 1 { SQRT_2 * nf / (p as f64 - 1.0) } else { 0.0 };
                    let half = nf;
                    for r in 0..p {
                        let off = centered(r) * spacing;
                        let base = [off * c, off * s];
                        let dir = [-s, c];
                        out.push((
                            [base[0] - half * dir[0], base[1] - half * dir[1]],
                            [base[0] + half * dir[0], base[1] + half * dir[1]],
                        ));
                    }
                }
                GeometryKind::FanCurved => {
                    let rs = self.source_radius;
                    let reach = rs + self.detector_radius;
                    let src = [rs * c, rs * s];
                    // fan covers the grid circumcircle
                    let half_fan = (nf / SQRT_2 / rs).min(1.0).asin();
                    let step = if p > 1 { 2.0 * half_fan / (p as f64 - 1.0) } else { 0.0 };
                    for r in 0..p {
                        let (gs, gc) = (centered(r) * step).sin_cos();
                        // rotate the inward direction (-c, -s) by the fan angle
                        let dir = [-c * gc + s * gs, -s * gc - c * gs];
                        out.push((src, [src[0] + reach * dir[0], src[1] + reach * dir[1]]));
                    }
                }
            }
        }
        out
    }
}

/// Pixel intersections of the segment `p0 -> p1` with an `n x n` grid as
/// `(row-major pixel index, length)`, sorted by pixel index.
pub fn trace_ray(p0: [f64; 2], p1: [f64; 2], n: usize) -> Vec<(usize, f64)> {
    let h = n as f64 / 2.0;
    let d = [p1[0] - p0[0], p1[1] - p0[1]];
    let len = d[0].hypot(d[1]);
    if len == 0.0 {
        return Vec::new();
    }

    let mut a_lo: f64 = 0.0;
    let mut a_hi: f64 = 1.0;
    for ax in 0..2 {
        if d[ax] == 0.0 {
            if p0[ax] <= -h || p0[ax] >= h {
                return Vec::new();
            }
        } else {
            let a1 = (-h - p0[ax]) / d[ax];
            let a2 = (h - p0[ax]) / d[ax];
            a_lo = a_lo.max(a1.min(a2));
            a_hi = a_hi.min(a1.max(a2));
        }
    }
    if a_hi <= a_lo {
        return Vec::new();
    }

    let mut alphas = Vec::with_capacity(2 * n + 4);
    alphas.push(a_lo);
    alphas.push(a_hi);
    for ax in 0..2 {
        if d[ax] == 0.0 {
            continue;
        }
        for k in 0..=n {
            let plane = -h + k as f64;
            let a = (plane - p0[ax]) / d[ax];
            if a > a_lo && a < a_hi {
                alphas.push(a);
            }
        }
    }
    alphas.sort_by(f64::total_cmp);

    let mut hits: Vec<(usize, f64)> = Vec::with_capacity(alphas.len());
    for w in alphas.windows(2) {
        let seg = (w[1] - w[0]) * len;
        if seg < MIN_INTERSECTION {
            continue;
        }
        let am = 0.5 * (w[0] + w[1]);
        let x = p0[0] + am * d[0];
        let y = p0[1] + am * d[1];
        let col = ((x + h).floor() as isize).clamp(0, n as isize - 1) as usize;
        let row = ((h - y).floor() as isize).clamp(0, n as isize - 1) as usize;
        hits.push((row * n + col, seg));
    }
    hits.sort_by_key(|h| h.0);
    hits.dedup_by(|later, first| {
        if later.0 == first.0 {
            first.1 += later.1;
            true
        } else {
            false
        }
    });
    hits
}

/// Assembles the operator for an explicit list of ray segments.
pub fn radon_from_rays(rays: &[([f64; 2], [f64; 2])], n: usize) -> Result<SparseOperator> {
    let mut triplets = Vec::new();
    for (r, &(p0, p1)) in rays.iter().enumerate() {
        triplets.extend(trace_ray(p0, p1, n).into_iter().map(|(c, w)| (r, c, w)));
    }
    if triplets.is_empty() {
        return Err(Error::EmptyOperator);
    }
    SparseOperator::from_triplets(rays.len(), n * n, triplets)
}

/// Discretized Radon transform for `geometry` on an `n x n` grid; shape
/// `(n_angles * n_rays_per_angle) x n^2`.
pub fn build_radon(geometry: &Geometry, n: usize) -> Result<SparseOperator> {
    geometry.validate(n)?;
    radon_from_rays(&geometry.rays(n), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_ray_through_one_row() {
        // y = 0.5 is the middle of row 1 of a 4x4 grid spanning [-2, 2]
        let hits = trace_ray([-10.0, 0.5], [10.0, 0.5], 4);
        assert_eq!(hits.len(), 4);
        for (k, &(pix, w)) in hits.iter().enumerate() {
            assert_eq!(pix, 4 + k);
            assert!((w - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_ray_through_pixel_corners() {
        let hits = trace_ray([-3.0, -3.0], [3.0, 3.0], 4);
        assert_eq!(hits.len(), 4);
        for &(_, w) in &hits {
            assert!((w - SQRT_2).abs() < 1e-12, "{w}");
        }
        // anti-diagonal pixels: (3,0), (2,1), (1,2), (0,3)
        let pix: Vec<usize> = hits.iter().map(|h| h.0).collect();
        assert_eq!(pix, vec![3, 6, 9, 12]);
    }

    #[test]
    fn parallel_45_degree_central_ray_has_sqrt2_weights() {
        let g = Geometry::parallel(4, 5, 180.0); // angles 0, 45, 90, 135
        let a = build_radon(&g, 16).unwrap();
        let row = 5 + 2; // angle 1 (45 deg), central ray
        let weights: Vec<f64> = a.row(row).map(|(_, w)| w).collect();
        assert_eq!(weights.len(), 16);
        for w in weights {
            assert!((w - SQRT_2).abs() < 1e-9, "{w}");
        }
    }

    #[test]
    fn ray_missing_the_grid_is_empty() {
        assert!(trace_ray([-10.0, 5.0], [10.0, 5.0], 4).is_empty());
        assert!(trace_ray([2.0, -9.0], [2.0, 9.0], 4).is_empty());
    }

    #[test]
    fn all_rays_missing_is_an_error() {
        let rays = vec![([-10.0, 50.0], [10.0, 50.0]), ([50.0, -10.0], [50.0, 10.0])];
        assert!(matches!(radon_from_rays(&rays, 16), Err(Error::EmptyOperator)));
    }

    #[test]
    fn shapes() {
        let a = build_radon(&Geometry::desk(), 64).unwrap();
        assert_eq!((a.rows(), a.cols()), (2850, 4096));
        let f = build_radon(&Geometry::fan_curved(32, 8, 45, 360.0), 32).unwrap();
        assert_eq!((f.rows(), f.cols()), (360, 1024));
        assert!(f.triplets().iter().all(|t| t.2 > 0.0));
    }

    #[test]
    fn invalid_geometry_rejected() {
        assert!(build_radon(&Geometry::parallel(0, 5, 180.0), 16).is_err());
        assert!(build_radon(&Geometry::parallel(3, 5, 0.0), 16).is_err());
        assert!(build_radon(&Geometry::parallel(3, 5, 361.0), 16).is_err());
        let mut fan = Geometry::fan_curved(16, 4, 9, 360.0);
        fan.source_radius = 5.0;
        assert!(build_radon(&fan, 16).is_err());
    }
}
