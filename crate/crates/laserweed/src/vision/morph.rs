//! Binary morphology with square structuring elements.

use crate::vision::raster::RasterImage;

fn window_op(img: &RasterImage, ksize: usize, take_max: bool) -> RasterImage {
    assert_eq!(img.channels(), 1, "morphology expects a binary image");
    assert!(ksize % 2 == 1, "structuring element must have odd size");
    let half = (ksize / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let mut out = RasterImage::new_gray(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut value = if take_max { 0u8 } else { 255u8 };
            for dy in -half..=half {
                for dx in -half..=half {
                    let xi = x as isize + dx;
                    let yi = y as isize + dy;
                    if xi < 0 || yi < 0 || xi >= w as isize || yi >= h as isize {
                        continue; // window clamped at the border
                    }
                    let v = img.get(xi as usize, yi as usize, 0);
                    value = if take_max { value.max(v) } else { value.min(v) };
                }
            }
            out.set(x, y, 0, value);
        }
    }
    out
}

/// Morphological dilation: max over the k x k neighborhood.
pub fn dilate(img: &RasterImage, ksize: usize) -> RasterImage {
    window_op(img, ksize, true)
}

/// Morphological erosion: min over the k x k neighborhood.
pub fn erode(img: &RasterImage, ksize: usize) -> RasterImage {
    window_op(img, ksize, false)
}

/// Closing: dilation followed by erosion. Bridges gaps narrower than the
/// structuring element.
pub fn close(img: &RasterImage, ksize: usize) -> RasterImage {
    erode(&dilate(img, ksize), ksize)
}
