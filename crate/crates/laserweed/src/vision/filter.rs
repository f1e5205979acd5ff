//! Separable Gaussian blur and the horizontal box blur used for motion
//! smear. Borders use symmetric reflection (the edge pixel is repeated:
//! index -1 maps to 0, -2 to 1, and so on).

use crate::vision::raster::RasterImage;

/// Sampled, normalized 1-D Gaussian kernel of odd length `ksize`.
pub fn gaussian_kernel(sigma: f64, ksize: usize) -> Vec<f64> {
    assert!(ksize % 2 == 1, "kernel size must be odd");
    assert!(sigma > 0.0);
    let half = (ksize / 2) as isize;
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

#[inline]
fn reflect(i: isize, len: usize) -> usize {
    let len = len as isize;
    let mut i = i;
    // Bounces until inside; at most a few iterations for small kernels.
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= len {
            i = 2 * len - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Separable Gaussian blur of a single-channel image.
pub fn gaussian_blur(img: &RasterImage, sigma: f64, ksize: usize) -> RasterImage {
    assert_eq!(img.channels(), 1, "gaussian_blur expects a gray image");
    let k = gaussian_kernel(sigma, ksize);
    let half = (ksize / 2) as isize;
    let (w, h) = (img.width(), img.height());

    // Horizontal pass into f64, then vertical pass with rounding.
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                let xi = reflect(x as isize + j as isize - half, w);
                acc += kv * img.get(xi, y, 0) as f64;
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = RasterImage::new_gray(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, kv) in k.iter().enumerate() {
                let yi = reflect(y as isize + j as isize - half, h);
                acc += kv * tmp[yi * w + x];
            }
            out.set(x, y, 0, acc.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

/// Horizontal box blur of an RGB image with a continuous kernel length.
///
/// The kernel is a centered box of width `len` pixels; the outermost taps
/// carry fractional weight, so the smear grows continuously with robot
/// speed instead of jumping at integer lengths. `len <= 1` is the
/// identity. The kernel is symmetric and never shifts centroids.
pub fn box_blur_horizontal(img: &RasterImage, len: f64) -> RasterImage {
    assert_eq!(img.channels(), 3, "box_blur_horizontal expects RGB");
    if len <= 1.0 {
        return img.clone();
    }
    let half_width = len / 2.0;
    let taps = half_width.ceil() as isize; // offsets -taps..=taps
    let weights: Vec<f64> = (-taps..=taps)
        .map(|i| {
            let overlap = (half_width - (i.abs() as f64 - 0.5)).clamp(0.0, 1.0);
            overlap / len
        })
        .collect();
    let (w, h) = (img.width(), img.height());
    let mut out = RasterImage::new_rgb(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0.0f64; 3];
            for (k, &wt) in weights.iter().enumerate() {
                if wt == 0.0 {
                    continue;
                }
                let xi = reflect(x as isize + k as isize - taps, w);
                let px = img.rgb(xi, y);
                for c in 0..3 {
                    acc[c] += wt * px[c] as f64;
                }
            }
            out.set_rgb(
                x,
                y,
                [
                    acc[0].round().clamp(0.0, 255.0) as u8,
                    acc[1].round().clamp(0.0, 255.0) as u8,
                    acc[2].round().clamp(0.0, 255.0) as u8,
                ],
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized() {
        for (sigma, ksize) in [(1.4, 5), (0.8, 3), (2.5, 9)] {
            let k = gaussian_kernel(sigma, ksize);
            let sum: f64 = k.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_image_is_unchanged() {
        let mut img = RasterImage::new_gray(16, 16);
        img.fill(137);
        let blurred = gaussian_blur(&img, 1.4, 5);
        assert_eq!(img, blurred);
    }

    #[test]
    fn impulse_response_matches_kernel() {
        let mut img = RasterImage::new_gray(11, 11);
        img.set(5, 5, 0, 255);
        let blurred = gaussian_blur(&img, 1.4, 5);
        let k = gaussian_kernel(1.4, 5);
        for (j, kv) in k.iter().enumerate() {
            let x = 3 + j;
            let expected = (255.0 * kv * k[2]).round() as u8;
            assert_eq!(blurred.get(x, 5, 0), expected, "column {x}");
        }
    }

    #[test]
    fn box_blur_identity_below_one() {
        let mut img = RasterImage::new_rgb(8, 2);
        img.set_rgb(3, 1, [9, 9, 9]);
        assert_eq!(box_blur_horizontal(&img, 0.0), img);
        assert_eq!(box_blur_horizontal(&img, 1.0), img);
    }

    #[test]
    fn box_blur_spreads_mass_horizontally() {
        let mut img = RasterImage::new_rgb(9, 1);
        img.set_rgb(4, 0, [255, 0, 0]);
        let out = box_blur_horizontal(&img, 3.0);
        assert_eq!(out.rgb(3, 0)[0], 85);
        assert_eq!(out.rgb(4, 0)[0], 85);
        assert_eq!(out.rgb(5, 0)[0], 85);
        assert_eq!(out.rgb(6, 0)[0], 0);
    }

    #[test]
    fn fractional_length_stays_centered_and_monotone() {
        let mut img = RasterImage::new_rgb(11, 1);
        img.set_rgb(5, 0, [250, 0, 0]);
        let mut last_peak = 251;
        for len in [1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5] {
            let out = box_blur_horizontal(&img, len);
            // symmetric
            for k in 1..5 {
                assert_eq!(out.rgb(5 - k, 0)[0], out.rgb(5 + k, 0)[0], "len {len}");
            }
            // peak decays monotonically with kernel length
            let peak = out.rgb(5, 0)[0];
            assert!(peak <= last_peak, "len {len}: {peak} > {last_peak}");
            last_peak = peak;
        }
    }
}
