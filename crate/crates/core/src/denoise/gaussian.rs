use super::reflect;
use crate::ops::Image;

/// Kernel standard deviation in pixels for strength `sigma`.
pub fn kernel_std(sigma: f64) -> f64 {
    (50.0 * sigma).clamp(0.3, 5.0)
}

/// Unit-sum 1-D Gaussian truncated at four standard deviations.
pub fn gaussian_kernel(std: f64) -> Vec<f64> {
    let radius = (4.0 * std).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * std * std)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable Gaussian blur with reflective boundary.
pub fn gaussian_smooth(x: &Image, std: f64) -> Image {
    let k = gaussian_kernel(std);
    let r = (k.len() / 2) as isize;
    let (w, h) = (x.width(), x.height());
    let src = x.data();

    let mut tmp = vec![0.0; w * h];
    for row in 0..h {
        let line = &src[row * w..(row + 1) * w];
        for col in 0..w {
            tmp[row * w + col] = k
                .iter()
                .enumerate()
                .map(|(t, kv)| kv * line[reflect(col as isize + t as isize - r, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            out[row * w + col] = k
                .iter()
                .enumerate()
                .map(|(t, kv)| kv * tmp[reflect(row as isize + t as isize - r, h) * w + col])
                .sum();
        }
    }
    x.with_data(out).expect("same shape")
}
