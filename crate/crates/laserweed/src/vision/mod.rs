//! From-scratch raster vision pipeline.
//!
//! Every kernel is deterministic with a documented border policy, so
//! golden-image tests are byte-exact. The two end-to-end pipelines are
//! [`detect::detect_weeds`] (downward camera) and [`detect::detect_rows`]
//! (forward camera); [`detect::detect_laser_spot`] serves the mirrored
//! accuracy camera.

pub mod calib;
pub mod color;
pub mod contours;
pub mod detect;
pub mod edges;
pub mod filter;
pub mod hough;
pub mod morph;
pub mod raster;
pub mod render;

pub use calib::{mirror_transform, WorkAreaCalibration};
pub use contours::{ClassifierThresholds, Contour, ContourClass};
pub use detect::{detect_laser_spot, detect_rows, detect_weeds, WeedDetection};
pub use hough::{select_row, DetectedRow, HoughParams};
pub use raster::RasterImage;
pub use render::{CameraModel, Overlay};

use serde::{Deserialize, Serialize};

/// Tunable thresholds of the vision pipelines. The published system left
/// all of these as values "established through multiple test iterations";
/// the defaults here are the calibrated equivalents and are frozen by the
/// golden tests.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct VisionConfig {
    /// HSV band isolating foliage (green hue, strong saturation/value).
    pub hsv_lo: [u8; 3],
    pub hsv_hi: [u8; 3],
    /// Gaussian blur before edge detection.
    pub blur_sigma: f64,
    pub blur_ksize: usize,
    /// Canny hysteresis thresholds on 8-bit gradient magnitude.
    pub canny_low: f32,
    pub canny_high: f32,
    /// Closing kernel after Canny (connects fragmented edges).
    pub close_ksize: usize,
    /// Relative-size classifier fractions.
    pub thresholds: ClassifierThresholds,
    /// Hough accumulator parameters (synthetic edge maps, CLI stage runs).
    pub hough: HoughParams,
    /// Hough parameters for the row pipeline's chord voting.
    pub row_hough: HoughParams,
    /// Dilation applied to the foliage mask before row edge detection.
    pub row_dilate_ksize: usize,
    /// Mask components below this pixel count are erased before row edge
    /// detection (weed dots must not vote for row lines).
    pub row_min_blob_area_px: usize,
    /// Parallel lines closer than this merge into one row centerline
    /// (a plant row images as two boundary tangents one crop apart).
    pub row_band_merge_px: f64,
    /// Lines with fewer votes than this fraction of the strongest line
    /// are discarded by the row pipeline.
    pub row_relative_votes: f64,
    /// Laser tint and per-channel match tolerance for spot detection.
    pub spot_rgb: [u8; 3],
    pub spot_tolerance: u8,
}

impl Default for VisionConfig {
    fn default() -> Self {
        VisionConfig {
            hsv_lo: [35, 160, 155],
            hsv_hi: [85, 255, 255],
            blur_sigma: 1.4,
            blur_ksize: 5,
            canny_low: 50.0,
            canny_high: 150.0,
            close_ksize: 3,
            thresholds: ClassifierThresholds::default(),
            hough: HoughParams::default(),
            row_hough: HoughParams {
                // Chord voting: six plants of the followed row collect
                // ~180 votes, any diagonal through two or three plants
                // stays near 90. The floor keeps two-plant remnants at a
                // row end alive and drops single plants.
                votes_min: 50,
                suppress_rho_px: 12.0,
                suppress_theta_deg: 10.0,
                ..HoughParams::default()
            },
            row_dilate_ksize: 3,
            row_min_blob_area_px: 500,
            row_band_merge_px: 50.0,
            row_relative_votes: 0.7,
            spot_rgb: render::LASER_SPOT_RGB,
            spot_tolerance: 60,
        }
    }
}
