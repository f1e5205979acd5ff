//! The simulated field: crop rows, weeds, obstacles, and the robot pose.
//!
//! Everything here is deterministic. Scenarios are generated from a
//! [`ScenarioSpec`] plus a 64-bit seed, and the skid-steer pose integration
//! in [`DriveModel::advance`] is a pure function of its inputs.

mod motion;
mod scenario;

pub use motion::{DriveModel, WheelSpeeds};
pub use scenario::{generate_scenario, ScenarioSpec};

use crate::geom::Point2;
use serde::{Deserialize, Serialize};

/// A straight crop row: plants at `plant_spacing_m` intervals along
/// `direction`, starting at `start`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CropRow {
    pub start: Point2,
    /// Unit vector along the row.
    pub direction: Point2,
    pub plant_spacing_m: f64,
    pub plant_radius_m: f64,
    pub length_m: f64,
}

impl CropRow {
    /// Centers of all plants in this row.
    pub fn plant_centers(&self) -> Vec<Point2> {
        let count = (self.length_m / self.plant_spacing_m).floor() as usize + 1;
        (0..count)
            .map(|i| {
                self.start
                    .add(self.direction.scale(i as f64 * self.plant_spacing_m))
            })
            .collect()
    }

    /// Perpendicular distance from `p` to the row's center line segment.
    pub fn lateral_distance(&self, p: Point2) -> f64 {
        let d = p.sub(self.start);
        let along = (d.x * self.direction.x + d.y * self.direction.y)
            .clamp(0.0, self.length_m);
        let closest = self.start.add(self.direction.scale(along));
        p.distance(closest)
    }
}

/// A single weed. `stem_radius_m` is the kill target for the laser;
/// the rendered canopy is the same scale at seedling stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Weed {
    pub position: Point2,
    pub stem_radius_m: f64,
    pub height_m: f64,
    pub eliminated: bool,
}

impl Weed {
    /// Radius of the rendered canopy disc.
    pub fn canopy_radius_m(&self) -> f64 {
        self.stem_radius_m
    }
}

/// Obstacle category; determines the traversal compliance factor used by
/// the suspension model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    Rock,
    Organic,
    Incline,
}

impl ObstacleKind {
    pub fn name(self) -> &'static str {
        match self {
            ObstacleKind::Rock => "rock",
            ObstacleKind::Organic => "organic",
            ObstacleKind::Incline => "incline",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Obstacle {
    pub position: Point2,
    pub height_cm: f64,
    pub kind: ObstacleKind,
}

/// The simulated world. Weeds are never created or destroyed after
/// generation, only flagged `eliminated`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldScenario {
    /// Field extent across the rows (y), meters.
    pub width_m: f64,
    /// Field extent along the rows (x), meters.
    pub length_m: f64,
    pub rows: Vec<CropRow>,
    pub weeds: Vec<Weed>,
    pub obstacles: Vec<Obstacle>,
    pub seed: u64,
}

impl FieldScenario {
    /// Ground-truth weed count (the "manual count" before an experiment).
    pub fn weed_count(&self) -> usize {
        self.weeds.len()
    }

    /// All crop plant centers paired with their radius.
    pub fn crop_discs(&self) -> Vec<(Point2, f64)> {
        self.rows
            .iter()
            .flat_map(|r| {
                let radius = r.plant_radius_m;
                r.plant_centers().into_iter().map(move |c| (c, radius))
            })
            .collect()
    }

    /// Snapshot of every entity as CSV ("entity,x_m,y_m,attr1,attr2,attr3").
    pub fn snapshot_csv(&self) -> String {
        let mut out = String::from("entity,x_m,y_m,attr1,attr2,attr3\n");
        for row in &self.rows {
            out.push_str(&format!(
                "crop_row,{},{},{},{},{}\n",
                row.start.x, row.start.y, row.direction.x, row.direction.y, row.length_m
            ));
            for c in row.plant_centers() {
                out.push_str(&format!(
                    "crop,{},{},{},,\n",
                    c.x, c.y, row.plant_radius_m
                ));
            }
        }
        for w in &self.weeds {
            out.push_str(&format!(
                "weed,{},{},{},{},{}\n",
                w.position.x, w.position.y, w.stem_radius_m, w.height_m, w.eliminated
            ));
        }
        for o in &self.obstacles {
            out.push_str(&format!(
                "obstacle,{},{},{},{},\n",
                o.position.x,
                o.position.y,
                o.height_cm,
                o.kind.name()
            ));
        }
        out
    }
}

/// Robot pose and odometry. Heading is normalized to `(-PI, PI]`;
/// `clock_s` and `odometer_m` are monotone non-decreasing.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Point2,
    pub heading_rad: f64,
    pub linear_speed_cm_s: f64,
    pub odometer_m: f64,
    pub clock_s: f64,
}

impl RobotState {
    pub fn at(position: Point2, heading_rad: f64) -> Self {
        RobotState {
            position,
            heading_rad: crate::geom::normalize_angle(heading_rad),
            linear_speed_cm_s: 0.0,
            odometer_m: 0.0,
            clock_s: 0.0,
        }
    }
}
