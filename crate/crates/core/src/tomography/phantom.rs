use crate::error::{Error, Result};
use crate::ops::Image;

/// One ellipse of the phantom: additive intensity, semi-axes, center and
/// rotation (degrees), on the unit square `[-1, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub intensity: f64,
    pub semi_x: f64,
    pub semi_y: f64,
    pub center_x: f64,
    pub center_y: f64,
    pub angle_deg: f64,
}

const fn e(intensity: f64, semi_x: f64, semi_y: f64, cx: f64, cy: f64, angle_deg: f64) -> Ellipse {
    Ellipse {
        intensity,
        semi_x,
        semi_y,
        center_x: cx,
        center_y: cy,
        angle_deg,
    }
}

/// The ten-ellipse Shepp-Logan table with the contrast-enhanced intensities
/// (Toft), whose rendered values lie in `[0, 1]`.
pub const SHEPP_LOGAN: [Ellipse; 10] = [
    e(1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    e(-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    e(-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    e(-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    e(0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    e(0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    e(0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    e(0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    e(0.1, 0.023, 0.023, 0.0, -0.605, 0.0),
    e(0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

/// Rasterizes a list of ellipses on an `n x n` grid by pixel-center
/// sampling. Column `j` sits at `x = (2j+1-n)/n`, row `i` at
/// `y = (n-2i-1)/n`; both are exact negations under mirroring.
pub fn render_ellipses(ellipses: &[Ellipse], n: usize) -> Image {
    let nf = n as f64;
    let mut data = vec![0.0; n * n];
    for el in ellipses {
        let (s, c) = el.angle_deg.to_radians().sin_cos();
        let (a2, b2) = (el.semi_x * el.semi_x, el.semi_y * el.semi_y);
        for i in 0..n {
            let y = (nf - (2 * i + 1) as f64) / nf;
            for j in 0..n {
                let x = ((2 * j + 1) as f64 - nf) / nf;
                let (dx, dy) = (x - el.center_x, y - el.center_y);
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                if u * u / a2 + v * v / b2 <= 1.0 {
                    data[i * n + j] += el.intensity;
                }
            }
        }
    }
    Image::new(n, n, data).expect("n*n buffer")
}

/// Shepp-Logan phantom on an `n x n` grid, affinely rescaled so that its
/// minimum is `lo` and its maximum is `hi`.
pub fn shepp_logan(n: usize, lo: f64, hi: f64) -> Result<Image> {
    if n < 16 {
        return Err(Error::invalid(format!("phantom needs n >= 16, got {n}")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("phantom needs lo < hi, got [{lo}, {hi}]")));
    }
    let native = render_ellipses(&SHEPP_LOGAN, n);
    Ok(rescale(&native, lo, hi))
}

fn rescale(img: &Image, lo: f64, hi: f64) -> Image {
    let (mn, mx) = (img.min(), img.max());
    let span = mx - mn;
    img.map(|v| {
        if v == mx {
            hi
        } else {
            lo + (v - mn) / span * (hi - lo)
        }
    })
}
