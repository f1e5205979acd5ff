//! Synthetic rendering of the field through the robot's calibrated cameras.
//!
//! Both cameras are modeled as rectified top-down views with fixed poses in
//! the robot frame (the physical rigs are calibrated to behave the same
//! way). A camera maps pixel centers to ground points through an
//! orthonormal basis expressed as (forward, left) vectors:
//!
//! * downward camera: image x runs along the direction of travel, image y
//!   to the robot's right; the footprint doubles as the laser working area.
//! * forward camera: image y runs toward the robot (bottom of the frame is
//!   nearest), image x to the robot's left. With this basis a crop row
//!   parallel to the heading is vertical in the frame, and the Hough angle
//!   of a tilted row equals the turn that re-aligns the robot.
//!
//! The mirrored accuracy camera renders the same scene with image y
//! flipped, like the physical camera mounted opposite the weed camera.
//!
//! Motion blur is a centered horizontal box kernel whose length grows with
//! robot speed; pixel noise is additive uniform noise scaled to match the
//! configured sigma.

use crate::geom::Point2;
use crate::vision::filter::box_blur_horizontal;
use crate::vision::raster::RasterImage;
use crate::world::{FieldScenario, RobotState};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Soil background color.
pub const SOIL_RGB: [u8; 3] = [110, 85, 60];
/// Foliage color shared by crops and weeds.
pub const PLANT_RGB: [u8; 3] = [55, 160, 45];
/// Rendered laser impact color (450 nm).
pub const LASER_SPOT_RGB: [u8; 3] = [0, 70, 255];
/// Rendered radius of the laser impact disc, meters.
pub const LASER_SPOT_RADIUS_M: f64 = 0.002;

/// A rectified ground camera at a calibrated pose in the robot frame.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraModel {
    /// Output size (width, height), px.
    pub resolution_px: (usize, usize),
    /// Ground extent imaged along the image x and y axes, meters.
    pub footprint_m: (f64, f64),
    /// Robot-frame (forward, left) direction of increasing image x.
    pub axis_x: (f64, f64),
    /// Robot-frame (forward, left) direction of increasing image y.
    pub axis_y: (f64, f64),
    /// Robot-frame (forward, left) position of the footprint center, m.
    pub center_m: (f64, f64),
    /// Additive pixel noise scale, 8-bit units.
    pub pixel_noise_sigma: f64,
    /// Motion blur kernel length per unit of robot speed, px/(cm/s).
    pub blur_px_per_cmps: f64,
    /// Mirror image y (the accuracy camera faces the weed camera).
    pub mirror_y: bool,
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel::downward()
    }
}

impl CameraModel {
    /// The downward weed camera; its footprint is the laser working area.
    pub fn downward() -> Self {
        CameraModel {
            resolution_px: (640, 480),
            footprint_m: (0.4, 0.3),
            axis_x: (1.0, 0.0),
            axis_y: (0.0, -1.0),
            center_m: (0.0, 0.0),
            pixel_noise_sigma: 2.0,
            blur_px_per_cmps: 0.25,
            mirror_y: false,
        }
    }

    /// The mirrored accuracy camera paired with the downward camera.
    pub fn mirrored() -> Self {
        CameraModel {
            mirror_y: true,
            ..CameraModel::downward()
        }
    }

    /// The forward row camera: a rectified strip 0.15 m to 1.65 m ahead,
    /// deep enough to image six or seven plants of the followed row.
    pub fn forward() -> Self {
        CameraModel {
            resolution_px: (320, 600),
            footprint_m: (0.8, 1.5),
            axis_x: (0.0, 1.0),
            axis_y: (-1.0, 0.0),
            center_m: (0.9, 0.0),
            pixel_noise_sigma: 2.0,
            blur_px_per_cmps: 0.0,
            mirror_y: false,
        }
    }

    pub fn mm_per_px_x(&self) -> f64 {
        self.footprint_m.0 * 1000.0 / self.resolution_px.0 as f64
    }

    pub fn mm_per_px_y(&self) -> f64 {
        self.footprint_m.1 * 1000.0 / self.resolution_px.1 as f64
    }

    /// Ground point imaged at continuous pixel coordinates (pixel centers
    /// at integers).
    pub fn pixel_to_world(&self, robot: &RobotState, px: (f64, f64)) -> Point2 {
        let (w, h) = self.resolution_px;
        let py = if self.mirror_y {
            (h as f64 - 1.0) - px.1
        } else {
            px.1
        };
        let sx = self.footprint_m.0 / w as f64;
        let sy = self.footprint_m.1 / h as f64;
        let a = (px.0 - (w as f64 - 1.0) / 2.0) * sx;
        let b = (py - (h as f64 - 1.0) / 2.0) * sy;
        let fwd = self.center_m.0 + a * self.axis_x.0 + b * self.axis_y.0;
        let left = self.center_m.1 + a * self.axis_x.1 + b * self.axis_y.1;
        let (s, c) = robot.heading_rad.sin_cos();
        Point2::new(
            robot.position.x + fwd * c - left * s,
            robot.position.y + fwd * s + left * c,
        )
    }

    /// Continuous pixel coordinates imaging a ground point.
    pub fn world_to_pixel(&self, robot: &RobotState, p: Point2) -> (f64, f64) {
        let (s, c) = robot.heading_rad.sin_cos();
        let dx = p.x - robot.position.x;
        let dy = p.y - robot.position.y;
        let fwd = dx * c + dy * s - self.center_m.0;
        let left = -dx * s + dy * c - self.center_m.1;
        let a = fwd * self.axis_x.0 + left * self.axis_x.1;
        let b = fwd * self.axis_y.0 + left * self.axis_y.1;
        let (w, h) = self.resolution_px;
        let sx = self.footprint_m.0 / w as f64;
        let sy = self.footprint_m.1 / h as f64;
        let px = a / sx + (w as f64 - 1.0) / 2.0;
        let mut py = b / sy + (h as f64 - 1.0) / 2.0;
        if self.mirror_y {
            py = (h as f64 - 1.0) - py;
        }
        (px, py)
    }
}

/// An extra disc to draw over the scene (the laser impact point).
#[derive(Debug, Clone, Copy)]
pub struct Overlay {
    pub position: Point2,
    pub radius_m: f64,
    pub rgb: [u8; 3],
}

fn draw_disc(img: &mut RasterImage, cam: &CameraModel, robot: &RobotState, center: Point2, radius_m: f64, rgb: [u8; 3]) {
    let (w, h) = cam.resolution_px;
    let c_px = cam.world_to_pixel(robot, center);
    // The camera bases are orthonormal with square pixels, so ground discs
    // stay discs in the image.
    let r_px = radius_m * 1000.0 / cam.mm_per_px_x();
    let x0 = (c_px.0 - r_px).floor().max(0.0) as usize;
    let x1 = (c_px.0 + r_px).ceil().min(w as f64 - 1.0) as usize;
    let y0 = (c_px.1 - r_px).floor().max(0.0) as usize;
    let y1 = (c_px.1 + r_px).ceil().min(h as f64 - 1.0) as usize;
    if x0 > x1 || y0 > y1 || c_px.0 + r_px < 0.0 || c_px.1 + r_px < 0.0 {
        return;
    }
    let r2 = r_px * r_px;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let dx = x as f64 - c_px.0;
            let dy = y as f64 - c_px.1;
            if dx * dx + dy * dy <= r2 {
                img.set_rgb(x, y, rgb);
            }
        }
    }
}

/// Render the scene through a camera.
///
/// Deterministic for a given (scenario, robot state, camera, seed):
/// soil background, plant discs for crops and live weeds, optional
/// overlays, then speed-proportional motion blur and additive noise.
pub fn render_view(
    scenario: &FieldScenario,
    robot: &RobotState,
    cam: &CameraModel,
    overlays: &[Overlay],
    seed: u64,
) -> RasterImage {
    let (w, h) = cam.resolution_px;
    let mut img = RasterImage::new_rgb(w, h);
    for i in 0..w * h {
        img.data_mut()[i * 3..i * 3 + 3].copy_from_slice(&SOIL_RGB);
    }

    // Prune scene discs to the footprint's bounding circle.
    let center_world = cam.pixel_to_world(
        robot,
        ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0),
    );
    let reach = 0.5 * (cam.footprint_m.0.hypot(cam.footprint_m.1));
    for (c, r) in scenario.crop_discs() {
        if c.distance(center_world) <= reach + r {
            draw_disc(&mut img, cam, robot, c, r, PLANT_RGB);
        }
    }
    for weed in &scenario.weeds {
        if weed.eliminated {
            continue;
        }
        let r = weed.canopy_radius_m();
        if weed.position.distance(center_world) <= reach + r {
            draw_disc(&mut img, cam, robot, weed.position, r, PLANT_RGB);
        }
    }
    for ov in overlays {
        if ov.position.distance(center_world) <= reach + ov.radius_m {
            draw_disc(&mut img, cam, robot, ov.position, ov.radius_m, ov.rgb);
        }
    }

    // Motion smear along the travel axis (image x on the downward camera).
    let blur_len = cam.blur_px_per_cmps * robot.linear_speed_cm_s.abs();
    if blur_len > 1.0 {
        img = box_blur_horizontal(&img, blur_len);
    }

    if cam.pixel_noise_sigma > 0.0 {
        // Uniform noise with half-width sqrt(3)*sigma matches the variance
        // of the configured Gaussian sigma and is cheap to draw in bulk.
        let amp = (cam.pixel_noise_sigma * 3f64.sqrt()).round() as i32;
        if amp > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut noise = vec![0u8; w * h * 3];
            rng.fill_bytes(&mut noise);
            let span = (2 * amp + 1) as i32;
            for (px, nb) in img.data_mut().iter_mut().zip(noise) {
                let offset = (nb as i32) % span - amp;
                *px = (*px as i32 + offset).clamp(0, 255) as u8;
            }
        }
    }
    img
}
