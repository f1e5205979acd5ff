//! Position analysis of the double four-bar suspension and the obstacle
//! traversal model.
//!
//! The suspension is a slider-crank: crank `a`, connecting link `b`, fixed
//! link offset `c`. The vector loop gives the connecting-link angle and the
//! slider (wheel center) position at maximum deflection:
//!
//! ```text
//! theta3 = asin((a sin(theta2) - c) / b)
//! d_m    = a cos(theta2) - b cos(theta3)
//! ```
//!
//! Two evaluation paths coexist. The *formula path* evaluates the equations
//! above; with the reference geometry it yields theta3 ~ -10.81 deg and
//! d_m ~ -80.5 mm. The *reported path* carries the published constants for
//! the same geometry (-10.47 deg, -90.69 mm, lift 137.31 mm -> 13.7 cm
//! obstacle limit). The two disagree and neither is silently corrected; the
//! traversal thresholds are calibrated against the reported path.

use crate::error::{Error, Result};
use crate::geom::{deg_to_rad, rad_to_deg};
use crate::world::{Obstacle, ObstacleKind};
use serde::{Deserialize, Serialize};

/// Published connecting-link angle at maximum deflection, degrees.
pub const REPORTED_THETA3_DEG: f64 = -10.47;
/// Published slider position at maximum deflection, mm.
pub const REPORTED_DM_MM: f64 = -90.69;

/// Link lengths and angles of one four-bar suspension mechanism.
/// Lengths in mm, angles in degrees (converted to radians internally).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SuspensionConfig {
    /// Crank length `a`.
    pub crank_mm: f64,
    /// Connecting link length `b`.
    pub coupler_mm: f64,
    /// Fixed and slider link offset `c`.
    pub offset_mm: f64,
    /// Crank angle `theta2` between slider axis and crank.
    pub crank_angle_deg: f64,
    /// Robot height `h`.
    pub height_mm: f64,
    /// Wheel radius `r`.
    pub wheel_radius_mm: f64,
}

impl Default for SuspensionConfig {
    fn default() -> Self {
        SuspensionConfig {
            crank_mm: 270.0,
            coupler_mm: 320.0,
            offset_mm: 195.0,
            crank_angle_deg: 30.0,
            height_mm: 320.0,
            wheel_radius_mm: 92.0,
        }
    }
}

impl SuspensionConfig {
    /// Original (rest) slider position `d_n = h - r`, mm.
    pub fn rest_slider_mm(&self) -> f64 {
        self.height_mm - self.wheel_radius_mm
    }
}

/// Solved suspension state at maximum deflection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPose {
    /// Connecting-link angle `theta3`, degrees.
    pub theta3_deg: f64,
    /// Slider position `d_m`, mm (negative: wheel center below the fixed link).
    pub slider_mm: f64,
    /// Maximum wheel lift `d_n - |d_m|`, mm.
    pub max_lift_mm: f64,
}

/// Connecting-link angle from the vector loop, degrees.
///
/// Fails with [`Error::LinkGeometry`] when the arcsine argument leaves
/// `[-1, 1]`, i.e. the mechanism cannot close.
pub fn solve_theta3(config: &SuspensionConfig) -> Result<f64> {
    let arg = (config.crank_mm * deg_to_rad(config.crank_angle_deg).sin() - config.offset_mm)
        / config.coupler_mm;
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::LinkGeometry(arg));
    }
    Ok(rad_to_deg(arg.asin()))
}

/// Slider position `d_m = a cos(theta2) - b cos(theta3)`, mm.
pub fn solve_slider_position(config: &SuspensionConfig, theta3_deg: f64) -> f64 {
    config.crank_mm * deg_to_rad(config.crank_angle_deg).cos()
        - config.coupler_mm * deg_to_rad(theta3_deg).cos()
}

/// Maximum wheel lift `d_n - |d_m|` for a given slider position.
pub fn wheel_lift_mm(config: &SuspensionConfig, slider_mm: f64) -> f64 {
    config.rest_slider_mm() - slider_mm.abs()
}

/// Formula path: solve the vector loop and derive the lift.
pub fn solve_pose(config: &SuspensionConfig) -> Result<SuspensionPose> {
    let theta3_deg = solve_theta3(config)?;
    let slider_mm = solve_slider_position(config, theta3_deg);
    Ok(SuspensionPose {
        theta3_deg,
        slider_mm,
        max_lift_mm: wheel_lift_mm(config, slider_mm),
    })
}

/// Reported path: the published constants for the reference geometry,
/// with the lift derived from this config's rest slider position.
pub fn reported_pose(config: &SuspensionConfig) -> SuspensionPose {
    SuspensionPose {
        theta3_deg: REPORTED_THETA3_DEG,
        slider_mm: REPORTED_DM_MM,
        max_lift_mm: wheel_lift_mm(config, REPORTED_DM_MM),
    }
}

/// Largest obstacle the suspension clears, cm, on the reported path.
/// 137.31 mm lift -> 13.731 cm for the reference geometry.
pub fn max_obstacle_cm(config: &SuspensionConfig) -> f64 {
    reported_pose(config).max_lift_mm / 10.0
}

/// Climb outcome over an obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Climb {
    Yes,
    Partial,
    No,
}

/// Effect of the traversal on row following.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavEffect {
    None,
    LightDeviation,
    SignificantDeviation,
}

/// Effect of the traversal on the camera feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageEffect {
    None,
    PartialDistortion,
    Unstable,
}

/// Traversal classification for one obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalOutcome {
    pub climb: Climb,
    pub nav_effect: NavEffect,
    pub image_effect: ImageEffect,
}

impl TraversalOutcome {
    pub fn short_codes(&self) -> (&'static str, &'static str, &'static str) {
        let climb = match self.climb {
            Climb::Yes => "Y",
            Climb::Partial => "P",
            Climb::No => "N",
        };
        let nav = match self.nav_effect {
            NavEffect::None => "NE",
            NavEffect::LightDeviation => "LD",
            NavEffect::SignificantDeviation => "SD",
        };
        let image = match self.image_effect {
            ImageEffect::None => "NE",
            ImageEffect::PartialDistortion => "PD",
            ImageEffect::Unstable => "UI",
        };
        (climb, nav, image)
    }
}

/// Compliance factor per obstacle kind. Organic matter compresses under the
/// wheels; inclines load the whole side at once. Model constants calibrated
/// against the published traversal table, not measured physics.
pub fn kind_factor(kind: ObstacleKind) -> f64 {
    match kind {
        ObstacleKind::Rock => 1.0,
        ObstacleKind::Organic => 0.85,
        ObstacleKind::Incline => 1.25,
    }
}

/// Effective height below which the climb is clean, cm.
const CLIMB_CLEAN_MAX_CM: f64 = 10.5;
/// Effective height at which navigation starts to deviate even on a
/// successful climb, cm.
const DEVIATION_ONSET_CM: f64 = 10.0;

/// Classify an obstacle traversal.
///
/// Effective height is `height_cm * kind_factor`. Climb is clean up to
/// 10.5 cm effective, partial up to the suspension lift limit (reported
/// path, 13.73 cm for the reference geometry, boundary inclusive), and
/// fails above it. Navigation and image effects follow the climb class,
/// with a light-deviation onset at 10 cm effective height.
pub fn traversal_outcome(obstacle: &Obstacle, config: &SuspensionConfig) -> TraversalOutcome {
    debug_assert!(obstacle.height_cm > 0.0);
    let effective_cm = obstacle.height_cm * kind_factor(obstacle.kind);
    let lift_limit_cm = max_obstacle_cm(config);

    let climb = if effective_cm <= CLIMB_CLEAN_MAX_CM {
        Climb::Yes
    } else if effective_cm <= lift_limit_cm {
        Climb::Partial
    } else {
        Climb::No
    };

    let (nav_effect, image_effect) = match climb {
        Climb::Yes => {
            if effective_cm >= DEVIATION_ONSET_CM {
                (NavEffect::LightDeviation, ImageEffect::None)
            } else {
                (NavEffect::None, ImageEffect::None)
            }
        }
        Climb::Partial => (NavEffect::LightDeviation, ImageEffect::PartialDistortion),
        Climb::No => (NavEffect::SignificantDeviation, ImageEffect::Unstable),
    };

    TraversalOutcome {
        climb,
        nav_effect,
        image_effect,
    }
}
