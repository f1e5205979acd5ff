//! The Hough line transform used for crop-row detection.
//!
//! Lines are parameterized as `rho = x cos(theta) + y sin(theta)` with
//! theta the normal angle. For a crop row, theta equals the row's angle
//! relative to the image vertical, which is exactly the heading error the
//! follower needs.

use serde::{Deserialize, Serialize};

use crate::vision::raster::RasterImage;

/// A detected crop row line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectedRow {
    /// Angle relative to the image vertical, degrees, in `(-90, 90]`.
    /// Positive when the line leans toward +x as y decreases (toward the
    /// top of the frame); through the forward camera's mapping this equals
    /// the turn that re-aligns the robot with the row.
    pub angle_deg: f64,
    /// Where the row enters the view (bottom border when it does).
    pub start_px: (f64, f64),
    /// Signed perpendicular distance from the image center, px.
    pub distance_from_center_px: f64,
    /// Gap to the nearest parallel detected line, if any.
    pub inter_row_spacing_px: Option<f64>,
    /// Accumulator votes behind this line.
    pub votes: u32,
}

/// Accumulator resolutions and peak thresholds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct HoughParams {
    pub rho_res_px: f64,
    pub theta_res_deg: f64,
    pub votes_min: u32,
    /// Peaks closer than this in rho to a stronger peak are suppressed...
    pub suppress_rho_px: f64,
    /// ...when also closer than this in theta.
    pub suppress_theta_deg: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            rho_res_px: 1.0,
            theta_res_deg: 1.0,
            // A kept crop-row line collects ~36 votes from three plant
            // boundaries in the forward view; stray alignments stay under
            // ~20.
            votes_min: 25,
            // Small enough that both boundary lines of one crop row
            // survive; the row pipeline merges them into the centerline.
            suppress_rho_px: 12.0,
            suppress_theta_deg: 4.0,
        }
    }
}

/// Vote every edge pixel into the (rho, theta) accumulator and return the
/// suppressed peaks as [`DetectedRow`]s. An empty edge map (or one with no
/// peak above `votes_min`) yields an empty list, which the navigator reads
/// as the end-of-row signal.
pub fn hough_lines(edges: &RasterImage, params: &HoughParams) -> Vec<DetectedRow> {
    assert_eq!(edges.channels(), 1, "hough_lines expects a binary image");
    let (w, h) = (edges.width(), edges.height());
    let n_theta = (180.0 / params.theta_res_deg).round() as usize;
    let rho_max = (w as f64).hypot(h as f64);
    let n_rho = (2.0 * rho_max / params.rho_res_px).ceil() as usize + 1;

    let thetas: Vec<f64> = (0..n_theta)
        .map(|k| -90.0 + k as f64 * params.theta_res_deg)
        .collect();
    let trig: Vec<(f64, f64)> = thetas
        .iter()
        .map(|t| {
            let r = t.to_radians();
            (r.cos(), r.sin())
        })
        .collect();

    let mut acc = vec![0u32; n_theta * n_rho];
    for y in 0..h {
        for x in 0..w {
            if edges.get(x, y, 0) == 0 {
                continue;
            }
            for (k, &(c, s)) in trig.iter().enumerate() {
                let rho = x as f64 * c + y as f64 * s;
                let ri = ((rho + rho_max) / params.rho_res_px).round() as usize;
                acc[k * n_rho + ri] += 1;
            }
        }
    }

    // Local maxima above the vote floor.
    let mut peaks: Vec<(u32, usize, usize)> = Vec::new(); // (votes, k, ri)
    for k in 0..n_theta {
        for ri in 0..n_rho {
            let v = acc[k * n_rho + ri];
            if v < params.votes_min {
                continue;
            }
            let mut is_max = true;
            'nb: for dk in -1isize..=1 {
                for dr in -1isize..=1 {
                    if dk == 0 && dr == 0 {
                        continue;
                    }
                    let nk = k as isize + dk;
                    let nr = ri as isize + dr;
                    if nk < 0 || nr < 0 || nk >= n_theta as isize || nr >= n_rho as isize {
                        continue;
                    }
                    let nv = acc[nk as usize * n_rho + nr as usize];
                    // Strictly greater neighbor wins; equal neighbors are
                    // deduplicated by the suppression pass.
                    if nv > v {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                peaks.push((v, k, ri));
            }
        }
    }

    // Strongest first; ties resolved by (theta, rho) for determinism.
    peaks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut kept: Vec<(u32, f64, f64)> = Vec::new(); // (votes, theta_deg, rho)
    for (v, k, ri) in peaks {
        let theta = thetas[k];
        let rho = ri as f64 * params.rho_res_px - rho_max;
        let close = kept.iter().any(|&(_, t, r)| {
            (t - theta).abs() <= params.suppress_theta_deg
                && (r - rho).abs() <= params.suppress_rho_px
        });
        if !close {
            kept.push((v, theta, rho));
        }
    }

    let center = (((w - 1) as f64) / 2.0, ((h - 1) as f64) / 2.0);
    let mut rows: Vec<DetectedRow> = kept
        .iter()
        .map(|&(votes, theta_deg, rho)| {
            let angle_deg = if theta_deg <= -90.0 + 1e-9 {
                90.0
            } else {
                theta_deg
            };
            let rad = theta_deg.to_radians();
            let (c, s) = (rad.cos(), rad.sin());
            let distance_from_center_px = rho - (center.0 * c + center.1 * s);
            // Entry point: intersection with the bottom border for
            // row-like lines, perpendicular foot from center otherwise.
            let start_px = if c.abs() > 0.2 {
                let yb = (h - 1) as f64;
                (((rho - yb * s) / c), yb)
            } else {
                (
                    center.0 + distance_from_center_px * c,
                    center.1 + distance_from_center_px * s,
                )
            };
            DetectedRow {
                angle_deg,
                start_px,
                distance_from_center_px,
                inter_row_spacing_px: None,
                votes,
            }
        })
        .collect();

    // Inter-row spacing: gap to the nearest parallel neighbor.
    let parallel_tol = (2.0 * params.theta_res_deg).max(2.0);
    for (i, row) in rows.iter_mut().enumerate() {
        let (_, theta, rho) = kept[i];
        let spacing = kept
            .iter()
            .enumerate()
            .filter(|&(j, &(_, t, _))| j != i && (t - theta).abs() <= parallel_tol)
            .map(|(_, &(_, _, r))| (r - rho).abs())
            .fold(f64::INFINITY, f64::min);
        if spacing.is_finite() {
            row.inter_row_spacing_px = Some(spacing);
        }
    }
    rows
}

/// Merge near-parallel lines closer than `max_gap_px` into their
/// vote-weighted centerline. A plant row images as its two boundary
/// tangents, one crop diameter apart; following either one would ride the
/// robot off-center, so the pair is collapsed onto the row's center.
pub fn merge_parallel_lines(
    rows: Vec<DetectedRow>,
    max_gap_px: f64,
    max_angle_diff_deg: f64,
) -> Vec<DetectedRow> {
    let mut consumed = vec![false; rows.len()];
    // Strongest-first grouping keeps the merge deterministic.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].votes.cmp(&rows[a].votes).then(a.cmp(&b)));
    let mut merged = Vec::new();
    for &i in &order {
        if consumed[i] {
            continue;
        }
        consumed[i] = true;
        let mut group = vec![&rows[i]];
        for &j in &order {
            if consumed[j] {
                continue;
            }
            if (rows[j].angle_deg - rows[i].angle_deg).abs() <= max_angle_diff_deg
                && (rows[j].distance_from_center_px - rows[i].distance_from_center_px).abs()
                    <= max_gap_px
            {
                consumed[j] = true;
                group.push(&rows[j]);
            }
        }
        let total: f64 = group.iter().map(|r| r.votes as f64).sum();
        let wavg = |f: fn(&DetectedRow) -> f64| -> f64 {
            group.iter().map(|r| f(r) * r.votes as f64).sum::<f64>() / total
        };
        merged.push(DetectedRow {
            angle_deg: wavg(|r| r.angle_deg),
            start_px: (wavg(|r| r.start_px.0), wavg(|r| r.start_px.1)),
            distance_from_center_px: wavg(|r| r.distance_from_center_px),
            inter_row_spacing_px: None,
            votes: total.round() as u32,
        });
    }
    // Re-derive spacing between the merged centerlines.
    let snapshot: Vec<(f64, f64)> = merged
        .iter()
        .map(|r| (r.angle_deg, r.distance_from_center_px))
        .collect();
    for (i, row) in merged.iter_mut().enumerate() {
        let spacing = snapshot
            .iter()
            .enumerate()
            .filter(|&(j, &(a, _))| j != i && (a - snapshot[i].0).abs() <= 2.0 * max_angle_diff_deg)
            .map(|(_, &(_, d))| (d - snapshot[i].1).abs())
            .fold(f64::INFINITY, f64::min);
        if spacing.is_finite() {
            row.inter_row_spacing_px = Some(spacing);
        }
    }
    merged
}

/// The row to follow: minimum absolute distance from the robot's center,
/// ties broken toward the smaller absolute angle.
pub fn select_row(rows: &[DetectedRow]) -> Option<&DetectedRow> {
    rows.iter().min_by(|a, b| {
        (a.distance_from_center_px.abs(), a.angle_deg.abs())
            .partial_cmp(&(b.distance_from_center_px.abs(), b.angle_deg.abs()))
            .unwrap()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vision::raster::RasterImage;

    /// Bresenham segment drawing into a binary image.
    fn draw_line(img: &mut RasterImage, a: (f64, f64), b: (f64, f64)) {
        let steps = (a.0 - b.0).abs().max((a.1 - b.1).abs()).ceil() as usize * 2 + 1;
        for i in 0..=steps {
            let t = i as f64 / steps as f64;
            let x = a.0 + (b.0 - a.0) * t;
            let y = a.1 + (b.1 - a.1) * t;
            let (xi, yi) = (x.round() as isize, y.round() as isize);
            if xi >= 0 && yi >= 0 && (xi as usize) < img.width() && (yi as usize) < img.height() {
                img.set(xi as usize, yi as usize, 0, 255);
            }
        }
    }

    /// A full-height line through `(x_mid, h/2)` at `angle_deg` from
    /// vertical, positive leaning toward +x at the top of the frame.
    fn line_at_angle(img: &mut RasterImage, x_mid: f64, angle_deg: f64) {
        let h = img.height() as f64;
        let rad = angle_deg.to_radians();
        let (dx, dy) = (rad.sin(), -rad.cos());
        let c = (x_mid, (h - 1.0) / 2.0);
        let half = h; // long enough to span the image
        draw_line(
            img,
            (c.0 - dx * half, c.1 - dy * half),
            (c.0 + dx * half, c.1 + dy * half),
        );
    }

    #[test]
    fn vertical_line_recovered_at_zero_angle() {
        let mut img = RasterImage::new_gray(201, 201);
        line_at_angle(&mut img, 100.0, 0.0);
        let rows = hough_lines(&img, &HoughParams::default());
        assert_eq!(rows.len(), 1);
        assert!(rows[0].angle_deg.abs() <= 1.0);
        assert!((rows[0].distance_from_center_px - 0.0).abs() <= 1.5);
        assert!((rows[0].start_px.0 - 100.0).abs() <= 1.5);
    }

    #[test]
    fn angles_recovered_within_resolution() {
        for angle in (-30..=30).step_by(5) {
            let mut img = RasterImage::new_gray(201, 201);
            line_at_angle(&mut img, 100.0, angle as f64);
            let rows = hough_lines(&img, &HoughParams::default());
            assert!(!rows.is_empty(), "no line at {angle} deg");
            let best = &rows[0];
            assert!(
                (best.angle_deg - angle as f64).abs() <= 1.0,
                "angle {angle}: got {:.2}",
                best.angle_deg
            );
        }
    }

    #[test]
    fn two_parallel_lines_spacing() {
        let mut img = RasterImage::new_gray(301, 301);
        line_at_angle(&mut img, 50.0, 0.0);
        line_at_angle(&mut img, 250.0, 0.0);
        let rows = hough_lines(&img, &HoughParams::default());
        assert_eq!(rows.len(), 2);
        for row in &rows {
            let spacing = row.inter_row_spacing_px.expect("parallel neighbor");
            assert!((spacing - 200.0).abs() <= 1.0, "spacing {spacing}");
        }
    }

    #[test]
    fn empty_edge_map_returns_no_rows() {
        let img = RasterImage::new_gray(100, 100);
        assert!(hough_lines(&img, &HoughParams::default()).is_empty());
    }

    #[test]
    fn select_row_prefers_center_then_angle() {
        let mk = |d: f64, a: f64| DetectedRow {
            angle_deg: a,
            start_px: (0.0, 0.0),
            distance_from_center_px: d,
            inter_row_spacing_px: None,
            votes: 10,
        };
        let rows = vec![mk(50.0, 0.0), mk(-10.0, 20.0), mk(10.0, 5.0)];
        let sel = select_row(&rows).unwrap();
        assert_eq!(sel.angle_deg, 5.0); // |d|=10 tie -> smaller |angle|
        assert!(select_row(&[]).is_none());
    }
}
