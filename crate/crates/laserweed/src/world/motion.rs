//! Skid-steer pose integration.
//!
//! All six wheels on a side rotate at the same speed, so the platform is
//! kinematically a differential drive: equal side speeds drive straight,
//! equal-and-opposite speeds produce a point turn about the center.

use crate::geom::{normalize_angle, Point2};
use crate::world::RobotState;
use serde::{Deserialize, Serialize};

/// Commanded ground speed per side, cm/s. Positive is forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WheelSpeeds {
    pub left_cm_s: f64,
    pub right_cm_s: f64,
}

impl WheelSpeeds {
    pub const fn new(left_cm_s: f64, right_cm_s: f64) -> Self {
        WheelSpeeds {
            left_cm_s,
            right_cm_s,
        }
    }

    pub const fn straight(speed_cm_s: f64) -> Self {
        WheelSpeeds::new(speed_cm_s, speed_cm_s)
    }

    /// Point turn; positive `speed_cm_s` turns counter-clockwise.
    pub const fn point_turn(speed_cm_s: f64) -> Self {
        WheelSpeeds::new(-speed_cm_s, speed_cm_s)
    }
}

/// Chassis geometry and drive limits for pose integration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct DriveModel {
    /// Lateral distance between the wheel track centers, meters.
    pub track_width_m: f64,
    /// Commanded speeds are clamped to this magnitude, cm/s.
    pub max_wheel_speed_cm_s: f64,
}

impl Default for DriveModel {
    fn default() -> Self {
        DriveModel {
            // 406 mm chassis width.
            track_width_m: 0.406,
            max_wheel_speed_cm_s: 100.0,
        }
    }
}

impl DriveModel {
    /// Advance the pose by `dt` seconds under constant wheel speeds.
    ///
    /// Uses the exact constant-twist arc, so splitting an interval into
    /// sub-steps reproduces the same final pose to rounding error.
    /// Speeds outside the configured limit are clamped, not rejected.
    ///
    /// # Panics
    /// Panics if `dt` is not strictly positive.
    pub fn advance(&self, state: &RobotState, speeds: WheelSpeeds, dt: f64) -> RobotState {
        assert!(dt > 0.0, "dt must be positive");
        let limit = self.max_wheel_speed_cm_s;
        let left = speeds.left_cm_s.clamp(-limit, limit) / 100.0;
        let right = speeds.right_cm_s.clamp(-limit, limit) / 100.0;

        let v = 0.5 * (left + right); // m/s
        let omega = (right - left) / self.track_width_m; // rad/s

        let theta0 = state.heading_rad;
        let (dx, dy) = if omega.abs() < 1e-12 {
            (v * dt * theta0.cos(), v * dt * theta0.sin())
        } else {
            let theta1 = theta0 + omega * dt;
            let r = v / omega;
            (r * (theta1.sin() - theta0.sin()), -r * (theta1.cos() - theta0.cos()))
        };

        RobotState {
            position: Point2::new(state.position.x + dx, state.position.y + dy),
            heading_rad: normalize_angle(theta0 + omega * dt),
            linear_speed_cm_s: v * 100.0,
            odometer_m: state.odometer_m + (v * dt).abs(),
            clock_s: state.clock_s + dt,
        }
    }

    /// Duration of a point turn through `angle_rad` at `angular_speed_rad_s`.
    pub fn point_turn_duration(&self, angle_rad: f64, angular_speed_rad_s: f64) -> f64 {
        angle_rad.abs() / angular_speed_rad_s
    }

    /// Wheel speeds producing a point turn at `angular_speed_rad_s`
    /// (positive = counter-clockwise).
    pub fn point_turn_speeds(&self, angular_speed_rad_s: f64) -> WheelSpeeds {
        let side = angular_speed_rad_s * self.track_width_m / 2.0 * 100.0;
        WheelSpeeds::new(-side, side)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn start() -> RobotState {
        RobotState::at(Point2::new(0.0, 0.0), 0.0)
    }

    #[test]
    fn straight_at_optimal_speed() {
        // Both sides at 42.5 cm/s for 1 s moves 0.425 m along +x.
        let m = DriveModel::default();
        let s = m.advance(&start(), WheelSpeeds::straight(42.5), 1.0);
        assert!((s.position.x - 0.425).abs() < 1e-12);
        assert!(s.position.y.abs() < 1e-12);
        assert!(s.heading_rad.abs() < 1e-12);
        assert!((s.clock_s - 1.0).abs() < 1e-12);
        assert!((s.odometer_m - 0.425).abs() < 1e-12);
    }

    #[test]
    fn quarter_point_turn_leaves_position_unchanged() {
        let m = DriveModel::default();
        let v = 20.0; // cm/s per side
        let omega = 2.0 * (v / 100.0) / m.track_width_m;
        let dt = (PI / 2.0) / omega;
        let s = m.advance(&start(), WheelSpeeds::point_turn(v), dt);
        assert!((s.heading_rad - PI / 2.0).abs() < 1e-12);
        assert!(s.position.x.abs() < 1e-12);
        assert!(s.position.y.abs() < 1e-12);
    }

    #[test]
    fn general_motion_matches_fine_step_integration() {
        // Closed-form arc vs Euler integration at dt/1000.
        let m = DriveModel::default();
        let speeds = WheelSpeeds::new(30.0, 55.0);
        let dt = 0.8;
        let coarse = m.advance(&start(), speeds, dt);

        let mut fine = start();
        let n = 1000;
        let h = dt / n as f64;
        let v = 0.5 * (0.30 + 0.55);
        let omega = (0.55 - 0.30) / m.track_width_m;
        for _ in 0..n {
            let (sin_t, cos_t) = fine.heading_rad.sin_cos();
            fine.position.x += v * h * cos_t;
            fine.position.y += v * h * sin_t;
            fine.heading_rad += omega * h;
            fine.clock_s += h;
        }
        assert!((coarse.position.x - fine.position.x).abs() < 1e-4);
        assert!((coarse.position.y - fine.position.y).abs() < 1e-4);
        assert!((coarse.heading_rad - fine.heading_rad).abs() < 1e-9);
    }

    #[test]
    fn substep_composition_is_exact() {
        let m = DriveModel::default();
        let speeds = WheelSpeeds::new(-12.0, 47.0);
        let whole = m.advance(&start(), speeds, 2.0);
        let mut split = start();
        for _ in 0..20 {
            split = m.advance(&split, speeds, 0.1);
        }
        assert!((whole.position.x - split.position.x).abs() < 1e-10);
        assert!((whole.position.y - split.position.y).abs() < 1e-10);
        assert!((whole.heading_rad - split.heading_rad).abs() < 1e-10);
    }

    #[test]
    fn speeds_are_clamped() {
        let m = DriveModel::default();
        let s = m.advance(&start(), WheelSpeeds::straight(500.0), 1.0);
        assert!((s.position.x - 1.0).abs() < 1e-12); // clamped to 100 cm/s
    }

    #[test]
    fn clock_and_odometer_monotone() {
        let m = DriveModel::default();
        let mut s = start();
        let mut last = (s.clock_s, s.odometer_m);
        for i in 0..50 {
            let sp = if i % 2 == 0 { 30.0 } else { -30.0 };
            s = m.advance(&s, WheelSpeeds::straight(sp), 0.05);
            assert!(s.clock_s >= last.0);
            assert!(s.odometer_m >= last.1);
            last = (s.clock_s, s.odometer_m);
        }
    }
}
