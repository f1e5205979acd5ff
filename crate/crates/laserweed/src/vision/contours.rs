//! Contour extraction and geometric classification.
//!
//! Components are 8-connected. Each component contributes one contour: its
//! outer boundary traced Moore-style, with the region enclosed by that
//! boundary (component plus any holes) supplying area and centroid moments.
//! Perimeter is the traced arc length, counting 1 per orthogonal step and
//! sqrt(2) per diagonal step.

use crate::vision::raster::RasterImage;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Classification of a contour by relative size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourClass {
    Noise,
    Weed,
    Crop,
}

/// One traced contour.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Contour {
    /// Outer boundary pixels in trace order.
    pub points: Vec<(i32, i32)>,
    /// Pixels enclosed by the outer boundary (component + holes).
    pub area_px2: f64,
    /// Arc length of the outer boundary.
    pub perimeter_px: f64,
    /// Region centroid `(m10/m00, m01/m00)` in pixel coordinates.
    pub centroid: (f64, f64),
    /// Assigned by [`classify_contours`]; `None` straight out of tracing.
    pub class: Option<ContourClass>,
}

impl Contour {
    /// True when any boundary pixel lies on the image border.
    pub fn touches_border(&self, width: usize, height: usize) -> bool {
        self.points
            .iter()
            .any(|&(x, y)| x == 0 || y == 0 || x == width as i32 - 1 || y == height as i32 - 1)
    }
}

/// Relative thresholds for [`classify_contours`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierThresholds {
    /// Contours with area AND perimeter below this fraction of the
    /// respective maxima are noise.
    pub noise_frac: f64,
    /// Contours with area AND perimeter above this fraction of the
    /// respective maxima are crops.
    pub crop_frac: f64,
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        ClassifierThresholds {
            noise_frac: 0.02,
            crop_frac: 0.6,
        }
    }
}

/// Moore neighborhood, cyclic from west, in image coordinates (y down).
const DIRS: [(i32, i32); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

/// Trace all contours of a binary image (foreground > 0).
pub fn find_contours(img: &RasterImage) -> Vec<Contour> {
    assert_eq!(img.channels(), 1, "find_contours expects a binary image");
    let (w, h) = (img.width() as i32, img.height() as i32);
    let fg = |x: i32, y: i32| -> bool {
        x >= 0 && y >= 0 && x < w && y < h && img.get(x as usize, y as usize, 0) > 0
    };

    // Label 8-connected components; remember each component's raster seed.
    let mut labels = vec![0u32; (w * h) as usize];
    let mut seeds: Vec<(i32, i32)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if fg(x, y) && labels[(y * w + x) as usize] == 0 {
                let label = seeds.len() as u32 + 1;
                seeds.push((x, y));
                let mut stack = vec![(x, y)];
                labels[(y * w + x) as usize] = label;
                while let Some((cx, cy)) = stack.pop() {
                    for (dx, dy) in DIRS {
                        let (nx, ny) = (cx + dx, cy + dy);
                        if fg(nx, ny) && labels[(ny * w + nx) as usize] == 0 {
                            labels[(ny * w + nx) as usize] = label;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }

    seeds
        .iter()
        .enumerate()
        .map(|(idx, &seed)| {
            let label = idx as u32 + 1;
            let in_label = |x: i32, y: i32| {
                x >= 0 && y >= 0 && x < w && y < h && labels[(y * w + x) as usize] == label
            };
            let points = trace_boundary(seed, in_label);
            let perimeter_px = path_length(&points);
            let (area_px2, centroid) = enclosed_moments(&labels, label, w, h);
            Contour {
                points,
                area_px2,
                perimeter_px,
                centroid,
                class: None,
            }
        })
        .collect()
}

/// Moore boundary trace from the component's raster-scan seed (whose west
/// and north neighbors are background). Terminates when a (pixel, entry
/// direction) state repeats, which handles single-pixel-wide spurs that
/// legitimately revisit pixels.
fn trace_boundary<F: Fn(i32, i32) -> bool>(start: (i32, i32), is_fg: F) -> Vec<(i32, i32)> {
    let mut points = vec![start];
    let mut current = start;
    let mut entry = 0usize; // index into DIRS pointing at the backtrack cell
    let mut seen: HashSet<((i32, i32), usize)> = HashSet::new();
    seen.insert((current, entry));
    loop {
        let mut found = None;
        for step in 1..=8 {
            let dir = (entry + step) % 8;
            let (dx, dy) = DIRS[dir];
            let next = (current.0 + dx, current.1 + dy);
            if is_fg(next.0, next.1) {
                found = Some((dir, next));
                break;
            }
        }
        let Some((dir, next)) = found else {
            break; // isolated pixel
        };
        let next_entry = (dir + 4) % 8;
        if !seen.insert((next, next_entry)) {
            break;
        }
        points.push(next);
        current = next;
        entry = next_entry;
    }
    if points.len() > 1 && points.first() == points.last() {
        points.pop();
    }
    points
}

fn path_length(points: &[(i32, i32)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut len = 0.0;
    for i in 0..points.len() {
        let a = points[i];
        let b = points[(i + 1) % points.len()];
        let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
        len += if dx + dy == 1 {
            1.0
        } else {
            std::f64::consts::SQRT_2
        };
    }
    len
}

/// Area and centroid of the region enclosed by the component's outer
/// boundary: flood the background inward from a padded bounding box; what
/// the flood cannot reach (the component and its holes) is the region.
fn enclosed_moments(labels: &[u32], label: u32, w: i32, h: i32) -> (f64, (f64, f64)) {
    let mut min_x = i32::MAX;
    let mut min_y = i32::MAX;
    let mut max_x = i32::MIN;
    let mut max_y = i32::MIN;
    for y in 0..h {
        for x in 0..w {
            if labels[(y * w + x) as usize] == label {
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    let bw = max_x - min_x + 3;
    let bh = max_y - min_y + 3;
    let in_component = |bx: i32, by: i32| -> bool {
        let (x, y) = (bx + min_x - 1, by + min_y - 1);
        x >= 0 && y >= 0 && x < w && y < h && labels[(y * w + x) as usize] == label
    };
    let mut reached = vec![false; (bw * bh) as usize];
    let mut stack = vec![(0i32, 0i32)];
    reached[0] = true;
    while let Some((bx, by)) = stack.pop() {
        for (dx, dy) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let (nx, ny) = (bx + dx, by + dy);
            if nx < 0 || ny < 0 || nx >= bw || ny >= bh {
                continue;
            }
            let i = (ny * bw + nx) as usize;
            if !reached[i] && !in_component(nx, ny) {
                reached[i] = true;
                stack.push((nx, ny));
            }
        }
    }
    let mut m00 = 0.0f64;
    let mut m10 = 0.0f64;
    let mut m01 = 0.0f64;
    for by in 0..bh {
        for bx in 0..bw {
            if !reached[(by * bw + bx) as usize] {
                let (x, y) = (bx + min_x - 1, by + min_y - 1);
                m00 += 1.0;
                m10 += x as f64;
                m01 += y as f64;
            }
        }
    }
    (m00, (m10 / m00, m01 / m00))
}

/// Drop 8-connected components smaller than `min_area_px` pixels.
/// Used by the row pipeline to erase weed dots before edge detection.
pub fn remove_small_components(img: &RasterImage, min_area_px: usize) -> RasterImage {
    assert_eq!(img.channels(), 1);
    let (w, h) = (img.width() as i32, img.height() as i32);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut keep_label = vec![false]; // index 0 unused
    let mut next = 0u32;
    let fg = |x: i32, y: i32| -> bool {
        x >= 0 && y >= 0 && x < w && y < h && img.get(x as usize, y as usize, 0) > 0
    };
    for y in 0..h {
        for x in 0..w {
            if fg(x, y) && labels[(y * w + x) as usize] == 0 {
                next += 1;
                let mut count = 0usize;
                let mut stack = vec![(x, y)];
                labels[(y * w + x) as usize] = next;
                while let Some((cx, cy)) = stack.pop() {
                    count += 1;
                    for (dx, dy) in DIRS {
                        let (nx, ny) = (cx + dx, cy + dy);
                        if fg(nx, ny) && labels[(ny * w + nx) as usize] == 0 {
                            labels[(ny * w + nx) as usize] = next;
                            stack.push((nx, ny));
                        }
                    }
                }
                keep_label.push(count >= min_area_px);
            }
        }
    }
    let mut out = RasterImage::new_gray(w as usize, h as usize);
    for i in 0..(w * h) as usize {
        let l = labels[i] as usize;
        if l > 0 && keep_label[l] {
            out.data_mut()[i] = 255;
        }
    }
    out
}

/// Apply relative-size classification. Noise needs both metrics under the
/// noise fraction of the per-image maxima; crops need both above the crop
/// fraction; everything in between — including mixed comparisons — is a
/// weed.
pub fn classify_contours(
    mut contours: Vec<Contour>,
    thresholds: &ClassifierThresholds,
) -> Vec<Contour> {
    if contours.is_empty() {
        return contours;
    }
    let max_area = contours.iter().map(|c| c.area_px2).fold(0.0, f64::max);
    let max_perim = contours.iter().map(|c| c.perimeter_px).fold(0.0, f64::max);
    for c in &mut contours {
        let small_area = c.area_px2 < thresholds.noise_frac * max_area;
        let small_perim = c.perimeter_px < thresholds.noise_frac * max_perim;
        let big_area = c.area_px2 > thresholds.crop_frac * max_area;
        let big_perim = c.perimeter_px > thresholds.crop_frac * max_perim;
        c.class = Some(if small_area && small_perim {
            ContourClass::Noise
        } else if big_area && big_perim {
            ContourClass::Crop
        } else {
            ContourClass::Weed
        });
    }
    contours
}
