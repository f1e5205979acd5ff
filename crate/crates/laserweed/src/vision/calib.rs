//! Pixel-to-gantry calibration and the mirror transform between the paired
//! accuracy cameras.
//!
//! The downward camera's footprint is the laser working area, so the
//! calibration is the affine map from pixel centers onto gantry
//! millimeters: pixel (0, 0) is half a pixel in from the gantry origin and
//! the scale is footprint/resolution. The gantry x axis runs along image x
//! (the direction of travel), y along image y.

use crate::vision::render::CameraModel;
use serde::{Deserialize, Serialize};

/// Affine pixel -> gantry map for the laser working area.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WorkAreaCalibration {
    pub mm_per_px_x: f64,
    pub mm_per_px_y: f64,
    /// Gantry position of continuous pixel (0, 0), mm.
    pub origin_mm: (f64, f64),
}

impl WorkAreaCalibration {
    /// Calibration implied by the downward camera model.
    pub fn from_camera(cam: &CameraModel) -> Self {
        let sx = cam.mm_per_px_x();
        let sy = cam.mm_per_px_y();
        WorkAreaCalibration {
            mm_per_px_x: sx,
            mm_per_px_y: sy,
            origin_mm: (0.5 * sx, 0.5 * sy),
        }
    }

    /// Gantry xy target over the ground point at continuous pixel `p`.
    /// The z component is left to the descent controller.
    pub fn pixel_to_gantry(&self, p: (f64, f64)) -> [f64; 2] {
        [
            self.origin_mm.0 + p.0 * self.mm_per_px_x,
            self.origin_mm.1 + p.1 * self.mm_per_px_y,
        ]
    }

    /// Continuous pixel under a gantry xy position.
    pub fn gantry_to_pixel(&self, g: [f64; 2]) -> (f64, f64) {
        (
            (g[0] - self.origin_mm.0) / self.mm_per_px_x,
            (g[1] - self.origin_mm.1) / self.mm_per_px_y,
        )
    }
}

/// Map a point seen by one of the paired cameras into the other's frame.
/// The cameras face each other, so the views are vertical mirrors:
/// y -> height - 1 - y, x unchanged. Involutive.
pub fn mirror_transform(p: (f64, f64), dims: (usize, usize)) -> (f64, f64) {
    (p.0, (dims.1 as f64 - 1.0) - p.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_is_involutive() {
        let dims = (640, 480);
        for p in [(0.0, 0.0), (10.0, 99.5), (321.25, 123.75)] {
            let q = mirror_transform(mirror_transform(p, dims), dims);
            assert_eq!(p, q);
        }
    }

    #[test]
    fn mirror_fixes_center_of_odd_height() {
        let p = mirror_transform((10.0, 50.0), (100, 101));
        assert_eq!(p, (10.0, 50.0));
    }

    #[test]
    fn mirror_boundary_row() {
        assert_eq!(mirror_transform((10.0, 0.0), (64, 100)), (10.0, 99.0));
    }

    #[test]
    fn pixel_gantry_round_trip_and_scale() {
        let cal = WorkAreaCalibration::from_camera(&CameraModel::downward());
        assert!((cal.mm_per_px_x - 0.625).abs() < 1e-12);
        assert!((cal.mm_per_px_y - 0.625).abs() < 1e-12);
        // Image center maps to the middle of the 400 x 300 mm work area.
        let c = cal.pixel_to_gantry((319.5, 239.5));
        assert!((c[0] - 200.0).abs() < 1e-9);
        assert!((c[1] - 150.0).abs() < 1e-9);
        let back = cal.gantry_to_pixel(c);
        assert!((back.0 - 319.5).abs() < 1e-9);
        assert!((back.1 - 239.5).abs() < 1e-9);
    }
}
