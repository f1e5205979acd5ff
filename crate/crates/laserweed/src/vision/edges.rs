//! Sobel gradients and Canny edge extraction.
//!
//! The pipeline blurs upstream, so `canny` here is only the gradient,
//! non-maximum-suppression, double-threshold and hysteresis stages.
//! Thresholds are quoted against raw Sobel magnitude: a hard 8-bit step
//! reads about 1020, a sigma-1.4 blurred step about 290, so the 50/150
//! defaults pass real boundaries and reject noise.

use crate::vision::raster::RasterImage;

/// Sobel x/y gradients with symmetric-reflect borders.
pub fn sobel_gradients(img: &RasterImage) -> (Vec<f32>, Vec<f32>) {
    assert_eq!(img.channels(), 1, "sobel expects a gray image");
    let (w, h) = (img.width(), img.height());
    let at = |x: isize, y: isize| -> f32 {
        let xi = if x < 0 {
            0
        } else if x >= w as isize {
            w - 1
        } else {
            x as usize
        };
        let yi = if y < 0 {
            0
        } else if y >= h as isize {
            h - 1
        } else {
            y as usize
        };
        img.get(xi, yi, 0) as f32
    };
    let mut gx = vec![0.0f32; w * h];
    let mut gy = vec![0.0f32; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let tl = at(x - 1, y - 1);
            let tc = at(x, y - 1);
            let tr = at(x + 1, y - 1);
            let ml = at(x - 1, y);
            let mr = at(x + 1, y);
            let bl = at(x - 1, y + 1);
            let bc = at(x, y + 1);
            let br = at(x + 1, y + 1);
            let i = y as usize * w + x as usize;
            gx[i] = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            gy[i] = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
        }
    }
    (gx, gy)
}

/// Canny edge map: 255 on edges, 0 elsewhere.
///
/// Plateau ties in non-maximum suppression break toward the gradient
/// direction (keep when >= the backward neighbor and > the forward one),
/// so a full-contrast step produces a single-pixel line. Hysteresis grows
/// 8-connected from pixels above `high` through pixels above `low`.
pub fn canny(img: &RasterImage, low: f32, high: f32) -> RasterImage {
    assert!(high >= low, "high threshold below low");
    let (w, h) = (img.width(), img.height());
    let (gx, gy) = sobel_gradients(img);
    let mag: Vec<f32> = gx.iter().zip(&gy).map(|(&x, &y)| x.hypot(y)).collect();

    // Non-maximum suppression along the quantized gradient direction.
    let mut thin = vec![0.0f32; w * h];
    if w >= 3 && h >= 3 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                let i = y * w + x;
                let m = mag[i];
                if m == 0.0 {
                    continue;
                }
                let mut angle = gy[i].atan2(gx[i]).to_degrees();
                if angle < 0.0 {
                    angle += 180.0;
                }
                // (backward, forward) neighbors along the gradient.
                let (back, fwd) = if !(22.5..157.5).contains(&angle) {
                    (mag[i - 1], mag[i + 1])
                } else if angle < 67.5 {
                    (mag[i - w - 1], mag[i + w + 1])
                } else if angle < 112.5 {
                    (mag[i - w], mag[i + w])
                } else {
                    (mag[i - w + 1], mag[i + w - 1])
                };
                if m >= back && m > fwd {
                    thin[i] = m;
                }
            }
        }
    }

    // Double threshold + hysteresis (8-connected BFS from strong pixels).
    let mut out = RasterImage::new_gray(w, h);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if thin[y * w + x] >= high && out.get(x, y, 0) == 0 {
                out.set(x, y, 0, 255);
                stack.push((x, y));
                while let Some((cx, cy)) = stack.pop() {
                    for dy in -1isize..=1 {
                        for dx in -1isize..=1 {
                            if dx == 0 && dy == 0 {
                                continue;
                            }
                            let nx = cx as isize + dx;
                            let ny = cy as isize + dy;
                            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if thin[ny * w + nx] >= low && out.get(nx, ny, 0) == 0 {
                                out.set(nx, ny, 0, 255);
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_image_has_no_edges() {
        let mut img = RasterImage::new_gray(32, 32);
        img.fill(90);
        let edges = canny(&img, 50.0, 150.0);
        assert!(edges.data().iter().all(|&v| v == 0));
    }

    #[test]
    fn vertical_step_gives_single_pixel_line() {
        let mut img = RasterImage::new_gray(32, 32);
        for y in 0..32 {
            for x in 16..32 {
                img.set(x, y, 0, 255);
            }
        }
        let edges = canny(&img, 50.0, 150.0);
        for y in 2..30 {
            let edge_cols: Vec<usize> =
                (0..32).filter(|&x| edges.get(x, y, 0) == 255).collect();
            assert_eq!(edge_cols.len(), 1, "row {y}: {edge_cols:?}");
            assert!(
                edge_cols[0] == 15 || edge_cols[0] == 16,
                "edge at column {}",
                edge_cols[0]
            );
        }
    }

    #[test]
    fn disc_edge_hugs_the_true_boundary() {
        let (w, h, r) = (96usize, 96usize, 30.0f64);
        let (cx, cy) = (47.5f64, 47.5f64);
        let mut img = RasterImage::new_gray(w, h);
        for y in 0..h {
            for x in 0..w {
                let d = (x as f64 - cx).hypot(y as f64 - cy);
                if d <= r {
                    img.set(x, y, 0, 255);
                }
            }
        }
        let edges = canny(&img, 50.0, 150.0);
        let mut count = 0;
        for y in 0..h {
            for x in 0..w {
                if edges.get(x, y, 0) == 255 {
                    count += 1;
                    let d = (x as f64 - cx).hypot(y as f64 - cy);
                    assert!(
                        (d - r).abs() <= 1.0,
                        "edge pixel ({x},{y}) is {:.2} px from the circle",
                        (d - r).abs()
                    );
                }
            }
        }
        // A ring of radius 30 has roughly 2*pi*30 = 188 pixels.
        assert!(count > 120, "only {count} edge pixels");
    }

    #[test]
    fn weak_edges_need_a_strong_anchor() {
        // A low-contrast step (raw magnitude 120) sits between the
        // thresholds; without a strong seed nothing survives hysteresis.
        let mut img = RasterImage::new_gray(16, 16);
        for y in 0..16 {
            for x in 8..16 {
                img.set(x, y, 0, 30);
            }
        }
        let edges = canny(&img, 50.0, 150.0);
        assert!(edges.data().iter().all(|&v| v == 0));
    }
}
