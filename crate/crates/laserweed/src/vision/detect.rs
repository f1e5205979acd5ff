//! The weed-detection and row-detection pipelines, assembled from the
//! raster kernels, plus laser-spot detection for the accuracy camera.

use crate::vision::color::{hsv_threshold, rgb_to_hsv};
use crate::vision::contours::{classify_contours, find_contours, remove_small_components, ContourClass};
use crate::vision::edges::canny;
use crate::vision::filter::gaussian_blur;
use crate::vision::hough::{hough_lines, merge_parallel_lines, DetectedRow};
use crate::vision::morph::{close, dilate};
use crate::vision::raster::RasterImage;
use crate::vision::VisionConfig;

/// Crop rectangle in pixels: (x0, y0, width, height).
pub type CropRect = (usize, usize, usize, usize);

/// Weed centroids found in one frame, full-image pixel coordinates.
#[derive(Debug, Clone, Default)]
pub struct WeedDetection {
    pub centroids_px: Vec<(f64, f64)>,
}

impl WeedDetection {
    pub fn count(&self) -> usize {
        self.centroids_px.len()
    }
}

/// Run the weed pipeline on a frame from the downward camera.
///
/// Stages: crop to the laser working area, HSV threshold, Gaussian blur,
/// Canny, morphological closing, contour extraction, relative-size
/// classification. Weed-class contours touching the crop-rect border are
/// deferred (the object will be fully visible in a later frame) and
/// centroids are reported in full-image coordinates.
pub fn detect_weeds(
    img: &RasterImage,
    rect: Option<CropRect>,
    cfg: &VisionConfig,
) -> WeedDetection {
    let (x0, y0, w, h) = rect.unwrap_or((0, 0, img.width(), img.height()));
    let view = if (x0, y0, w, h) == (0, 0, img.width(), img.height()) {
        img.clone()
    } else {
        match img.crop(x0, y0, w, h) {
            Ok(v) => v,
            Err(_) => return WeedDetection::default(),
        }
    };

    let hsv = rgb_to_hsv(&view);
    let mask = hsv_threshold(&hsv, cfg.hsv_lo, cfg.hsv_hi);
    let blurred = gaussian_blur(&mask, cfg.blur_sigma, cfg.blur_ksize);
    let edges = canny(&blurred, cfg.canny_low, cfg.canny_high);
    let closed = close(&edges, cfg.close_ksize);
    let contours = classify_contours(find_contours(&closed), &cfg.thresholds);

    let centroids_px = contours
        .iter()
        .filter(|c| c.class == Some(ContourClass::Weed))
        .filter(|c| !c.touches_border(w, h))
        .map(|c| (c.centroid.0 + x0 as f64, c.centroid.1 + y0 as f64))
        .collect();
    WeedDetection { centroids_px }
}

/// Run the row pipeline on a frame from the forward camera.
///
/// Stages: HSV threshold, dilation, area filtering (weed dots and debris
/// are far smaller than crop plants and would otherwise vote spurious
/// lines), Hough over the plant mask, parallel-line merging and a
/// relative vote floor. An empty result is the end-of-row signal.
///
/// Voting over the filled mask rather than plant boundaries makes the row
/// centerline collect whole chords through every plant. Rendered plants
/// are perfect discs, so boundary votes alone are isotropic and a
/// diagonal grazing two plants can out-vote the true row; chord voting
/// restores the margin that textured real foliage provides.
pub fn detect_rows(img: &RasterImage, cfg: &VisionConfig) -> Vec<DetectedRow> {
    let hsv = rgb_to_hsv(img);
    let mask = hsv_threshold(&hsv, cfg.hsv_lo, cfg.hsv_hi);
    let thick = dilate(&mask, cfg.row_dilate_ksize);
    let plants = remove_small_components(&thick, cfg.row_min_blob_area_px);
    let lines = hough_lines(&plants, &cfg.row_hough);
    let merged = merge_parallel_lines(lines, cfg.row_band_merge_px, 4.0);
    let max_votes = merged.iter().map(|r| r.votes).max().unwrap_or(0) as f64;
    merged
        .into_iter()
        .filter(|r| r.votes as f64 >= cfg.row_relative_votes * max_votes)
        .collect()
}

/// Find the laser impact blob in the accuracy camera's frame.
///
/// Only colors within the configured per-channel tolerance of the 450 nm
/// laser tint count; foliage and soil never match. Returns the centroid of
/// the largest matching blob, or `None` when no pixel matches.
pub fn detect_laser_spot(img: &RasterImage, cfg: &VisionConfig) -> Option<(f64, f64)> {
    let mut mask = RasterImage::new_gray(img.width(), img.height());
    let mut any = false;
    for y in 0..img.height() {
        for x in 0..img.width() {
            let px = img.rgb(x, y);
            let matches = (0..3).all(|c| {
                (px[c] as i32 - cfg.spot_rgb[c] as i32).abs() <= cfg.spot_tolerance as i32
            });
            if matches {
                mask.set(x, y, 0, 255);
                any = true;
            }
        }
    }
    if !any {
        return None;
    }
    find_contours(&mask)
        .into_iter()
        .max_by(|a, b| a.area_px2.partial_cmp(&b.area_px2).unwrap())
        .map(|c| c.centroid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;
    use crate::vision::render::{render_view, CameraModel, Overlay, LASER_SPOT_RGB};
    use crate::world::{generate_scenario, RobotState, ScenarioSpec, Weed};

    fn scenario_with_weeds(weeds: &[(f64, f64, f64)]) -> crate::world::FieldScenario {
        let spec = ScenarioSpec {
            row_count: 1,
            weed_density_per_m: 0.0,
            ..ScenarioSpec::default()
        };
        let mut sc = generate_scenario(&spec, 1).unwrap();
        for &(x, y, r) in weeds {
            sc.weeds.push(Weed {
                position: Point2::new(x, y),
                stem_radius_m: r,
                height_m: 0.1,
                eliminated: false,
            });
        }
        sc
    }

    #[test]
    fn detects_two_weeds_near_their_rendered_centers() {
        // Row at y=0.6 (plants every 0.25 m), two weeds beside it.
        let sc = scenario_with_weeds(&[(5.03, 0.54, 0.009), (4.92, 0.68, 0.012)]);
        let robot = RobotState::at(Point2::new(5.0, 0.6), 0.0);
        let cam = CameraModel::downward();
        let img = render_view(&sc, &robot, &cam, &[], 3);
        let cfg = VisionConfig::default();
        let det = detect_weeds(&img, None, &cfg);
        assert_eq!(det.count(), 2, "centroids: {:?}", det.centroids_px);
        for &(wx, wy, _) in &[(5.03, 0.54, 0.0), (4.92, 0.68, 0.0)] {
            let expected = cam.world_to_pixel(&robot, Point2::new(wx, wy));
            let hit = det
                .centroids_px
                .iter()
                .any(|&(cx, cy)| (cx - expected.0).hypot(cy - expected.1) <= 2.0);
            assert!(hit, "no centroid within 2 px of {expected:?}");
        }
    }

    #[test]
    fn weed_free_frame_detects_nothing() {
        let sc = scenario_with_weeds(&[]);
        let robot = RobotState::at(Point2::new(5.0, 0.6), 0.0);
        let img = render_view(&sc, &robot, &CameraModel::downward(), &[], 3);
        let det = detect_weeds(&img, None, &VisionConfig::default());
        assert_eq!(det.count(), 0, "false positives: {:?}", det.centroids_px);
    }

    #[test]
    fn laser_spot_centroid_recovered() {
        let sc = scenario_with_weeds(&[(5.05, 0.62, 0.01)]);
        let robot = RobotState::at(Point2::new(5.0, 0.6), 0.0);
        let cam = CameraModel::mirrored();
        let spot_world = Point2::new(5.02, 0.57);
        let img = render_view(
            &sc,
            &robot,
            &cam,
            &[Overlay {
                position: spot_world,
                radius_m: 0.002,
                rgb: LASER_SPOT_RGB,
            }],
            11,
        );
        let cfg = VisionConfig::default();
        let c = detect_laser_spot(&img, &cfg).expect("spot visible");
        let expected = cam.world_to_pixel(&robot, spot_world);
        assert!(
            (c.0 - expected.0).hypot(c.1 - expected.1) <= 0.5,
            "centroid {c:?} vs {expected:?}"
        );
    }

    #[test]
    fn no_spot_when_none_rendered() {
        let sc = scenario_with_weeds(&[(5.05, 0.62, 0.01)]);
        let robot = RobotState::at(Point2::new(5.0, 0.6), 0.0);
        let img = render_view(&sc, &robot, &CameraModel::mirrored(), &[], 11);
        assert!(detect_laser_spot(&img, &VisionConfig::default()).is_none());
    }

    #[test]
    fn straight_row_ahead_reads_vertical() {
        let sc = scenario_with_weeds(&[]);
        let robot = RobotState::at(Point2::new(3.0, 0.6), 0.0);
        let img = render_view(&sc, &robot, &CameraModel::forward(), &[], 5);
        let rows = detect_rows(&img, &VisionConfig::default());
        assert!(!rows.is_empty(), "row not seen");
        let row = crate::vision::hough::select_row(&rows).unwrap();
        assert!(row.angle_deg.abs() <= 2.0, "angle {}", row.angle_deg);
    }

    #[test]
    fn tilted_row_angle_equals_required_turn() {
        let sc = scenario_with_weeds(&[]);
        // Robot rotated -10 deg relative to the row: must turn +10 to align.
        let robot = RobotState::at(Point2::new(3.0, 0.6), (-10f64).to_radians());
        let img = render_view(&sc, &robot, &CameraModel::forward(), &[], 5);
        let rows = detect_rows(&img, &VisionConfig::default());
        assert!(!rows.is_empty());
        let row = crate::vision::hough::select_row(&rows).unwrap();
        assert!(
            (row.angle_deg - 10.0).abs() <= 2.0,
            "angle {} should be ~ +10",
            row.angle_deg
        );
    }

    #[test]
    fn past_the_row_end_hough_is_empty() {
        let sc = scenario_with_weeds(&[]);
        // 1.2 m past the last plant: nothing ahead.
        let robot = RobotState::at(Point2::new(11.2, 0.6), 0.0);
        let img = render_view(&sc, &robot, &CameraModel::forward(), &[], 5);
        let rows = detect_rows(&img, &VisionConfig::default());
        assert!(rows.is_empty(), "unexpected rows: {rows:?}");
    }
}
