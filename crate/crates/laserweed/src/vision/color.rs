//! RGB to HSV conversion and in-band thresholding.

use crate::vision::raster::RasterImage;

/// Convert one RGB triple to HSV with all channels scaled to 0..=255.
///
/// Standard hexcone model: hue is the angle on the color wheel mapped from
/// 0..360 degrees onto 0..=255, saturation is `255 * delta / max`, value is
/// the channel maximum. Achromatic pixels get hue 0.
pub fn rgb_to_hsv_px(rgb: [u8; 3]) -> [u8; 3] {
    let r = rgb[0] as f64;
    let g = rgb[1] as f64;
    let b = rgb[2] as f64;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let hue_deg = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };

    let h = (hue_deg * 255.0 / 360.0).round().min(255.0) as u8;
    let s = if max == 0.0 {
        0
    } else {
        (255.0 * delta / max).round() as u8
    };
    let v = max as u8;
    [h, s, v]
}

/// Convert an RGB image to HSV (same layout, channels H, S, V).
pub fn rgb_to_hsv(img: &RasterImage) -> RasterImage {
    assert_eq!(img.channels(), 3, "rgb_to_hsv needs an RGB image");
    let mut out = RasterImage::new_rgb(img.width(), img.height());
    for y in 0..img.height() {
        for x in 0..img.width() {
            out.set_rgb(x, y, rgb_to_hsv_px(img.rgb(x, y)));
        }
    }
    out
}

/// Binary mask: 255 where every channel lies within `[lo, hi]`, else 0.
/// Bounds are inclusive and do not wrap around the hue circle.
pub fn hsv_threshold(hsv: &RasterImage, lo: [u8; 3], hi: [u8; 3]) -> RasterImage {
    assert_eq!(hsv.channels(), 3, "hsv_threshold needs a 3-channel image");
    let mut out = RasterImage::new_gray(hsv.width(), hsv.height());
    for y in 0..hsv.height() {
        for x in 0..hsv.width() {
            let px = hsv.rgb(x, y);
            let inside = (0..3).all(|c| px[c] >= lo[c] && px[c] <= hi[c]);
            out.set(x, y, 0, if inside { 255 } else { 0 });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_red() {
        assert_eq!(rgb_to_hsv_px([255, 0, 0]), [0, 255, 255]);
    }

    #[test]
    fn achromatic_gray() {
        let [_, s, v] = rgb_to_hsv_px([128, 128, 128]);
        assert_eq!(s, 0);
        assert_eq!(v, 128);
    }

    #[test]
    fn pure_green_and_blue() {
        // Green 120 deg -> 85, blue 240 deg -> 170 on the 0..=255 scale.
        assert_eq!(rgb_to_hsv_px([0, 255, 0]), [85, 255, 255]);
        assert_eq!(rgb_to_hsv_px([0, 0, 255]), [170, 255, 255]);
    }

    #[test]
    fn laser_tint_sits_in_the_blue_band() {
        // (0, 70, 255): max=B, delta=255.
        // hue = 60 * ((0 - 70)/255 + 4) = 223.53 deg -> 158.
        let [h, s, v] = rgb_to_hsv_px([0, 70, 255]);
        assert_eq!(h, 158);
        assert_eq!(s, 255);
        assert_eq!(v, 255);
        assert!((128..=184).contains(&h), "blue-band hue");
    }

    #[test]
    fn threshold_is_inclusive_per_channel() {
        let mut img = RasterImage::new_rgb(3, 1);
        img.set_rgb(0, 0, [0, 255, 0]); // green, H=85
        img.set_rgb(1, 0, [255, 0, 0]); // red, H=0
        img.set_rgb(2, 0, [50, 200, 30]); // leafy green, H=80
        let hsv = rgb_to_hsv(&img);
        let mask = hsv_threshold(&hsv, [35, 60, 60], [85, 255, 255]);
        assert_eq!(mask.get(0, 0, 0), 255);
        assert_eq!(mask.get(1, 0, 0), 0);
        assert_eq!(mask.get(2, 0, 0), 255);
    }
}
