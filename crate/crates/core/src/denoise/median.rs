use super::reflect;
use crate::ops::Image;

/// One pass of a `window x window` median filter with reflective boundary.
/// `window` must be odd.
pub fn median_filter(x: &Image, window: usize) -> Image {
    debug_assert!(window % 2 == 1);
    let r = (window / 2) as isize;
    let (w, h) = (x.width(), x.height());
    let src = x.data();
    let mut buf = Vec::with_capacity(window * window);
    let mut out = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            buf.clear();
            for dr in -r..=r {
                let rr = reflect(row as isize + dr, h);
                for dc in -r..=r {
                    buf.push(src[rr * w + reflect(col as isize + dc, w)]);
                }
            }
            let mid = buf.len() / 2;
            let (_, m, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
            out[row * w + col] = *m;
        }
    }
    x.with_data(out).expect("same shape")
}
