//! Row-following control: initial alignment, the 5-degree feedback
//! correction, end-of-row detection and the two-point-turn row change.
//!
//! The controller never integrates odometry for steering; every cycle it
//! compares the Hough row angle against the current heading (the detected
//! angle *is* the turn that re-aligns the robot) and corrects only when the
//! deviation exceeds the configured threshold.

mod mission;

pub use mission::{
    heading_error_vs_row, run_mission, run_mission_from, Engagement, FireMode, LogEvent,
    MissionConfig, MissionLog,
};

use crate::vision::DetectedRow;
use serde::{Deserialize, Serialize};

/// Row-follower parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct NavConfig {
    /// Corrective turns trigger strictly above this deviation, degrees.
    pub deviation_threshold_deg: f64,
    /// Clearance driven past the last detected row before turning, m.
    pub exit_distance_m: f64,
    /// Mission ends after this many rows.
    pub max_rows: usize,
    /// Lateral offsets beyond this trigger a side-step during alignment, mm.
    pub lateral_tolerance_mm: f64,
}

impl Default for NavConfig {
    fn default() -> Self {
        NavConfig {
            deviation_threshold_deg: 5.0,
            exit_distance_m: 0.5,
            max_rows: 2,
            lateral_tolerance_mm: 25.0,
        }
    }
}

/// Mission state machine modes; transitions follow
/// aligning -> following -> exiting -> turning -> aligning ... -> done.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavMode {
    Aligning,
    Following,
    Exiting,
    Turning,
    Done,
}

/// Controller state carried across cycles.
#[derive(Debug, Clone)]
pub struct NavState {
    pub mode: NavMode,
    pub target_row: Option<DetectedRow>,
    pub rows_completed: usize,
    /// Robot heading minus row angle, degrees (negated detected angle).
    pub heading_error_deg: f64,
}

impl NavState {
    pub fn new() -> Self {
        NavState {
            mode: NavMode::Aligning,
            target_row: None,
            rows_completed: 0,
            heading_error_deg: 0.0,
        }
    }
}

impl Default for NavState {
    fn default() -> Self {
        NavState::new()
    }
}

/// One drive primitive; missions execute sequences of these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DriveCommand {
    /// Straight segment at cruise speed (negative = reverse).
    Advance { distance_m: f64 },
    /// Point turn about the robot center; positive is counter-clockwise.
    PointTurn { angle_deg: f64 },
}

/// Turn-and-shift command produced by [`align_to_row`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignCommand {
    /// Turn by the row's angle.
    pub turn_deg: f64,
    /// Side-step that centers the wheels astride the row; positive moves
    /// toward positive image x of the forward camera (robot's left).
    pub lateral_mm: f64,
}

impl AlignCommand {
    pub fn is_noop(&self, cfg: &NavConfig) -> bool {
        self.turn_deg.abs() <= 0.5 && self.lateral_mm.abs() <= cfg.lateral_tolerance_mm
    }
}

/// Initial alignment: rotate by the detected row angle and correct the
/// lateral offset so the wheels straddle the inter-row spacing.
pub fn align_to_row(row: &DetectedRow, mm_per_px: f64) -> AlignCommand {
    AlignCommand {
        turn_deg: row.angle_deg,
        lateral_mm: row.distance_from_center_px * mm_per_px,
    }
}

/// Per-cycle follower action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FollowAction {
    /// Keep driving straight at cruise speed.
    Straight,
    /// Stop and turn by this angle (the detected row angle), then resume.
    CorrectiveTurn { angle_deg: f64 },
}

/// Compare the row angle with the heading: deviations strictly above the
/// threshold trigger a point turn equal to the difference, anything else
/// keeps driving straight.
pub fn follow_step(cfg: &NavConfig, row: &DetectedRow) -> FollowAction {
    if row.angle_deg.abs() > cfg.deviation_threshold_deg {
        FollowAction::CorrectiveTurn {
            angle_deg: row.angle_deg,
        }
    } else {
        FollowAction::Straight
    }
}

/// Direction of the row-change maneuver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnDirection {
    /// Counter-clockwise 90-degree turns.
    Left,
    /// Clockwise 90-degree turns.
    Right,
}

impl TurnDirection {
    pub fn sign(self) -> f64 {
        match self {
            TurnDirection::Left => 1.0,
            TurnDirection::Right => -1.0,
        }
    }

    pub fn flipped(self) -> TurnDirection {
        match self {
            TurnDirection::Left => TurnDirection::Right,
            TurnDirection::Right => TurnDirection::Left,
        }
    }
}

/// The end-of-row maneuver: clear the row, two point turns with the
/// inter-row spacing driven between them. Leaves the robot in front of the
/// next row heading opposite to the entry heading, displaced laterally by
/// exactly the spacing.
pub fn end_of_row_maneuver(
    inter_row_spacing_m: f64,
    direction: TurnDirection,
    exit_distance_m: f64,
) -> Vec<DriveCommand> {
    let turn = 90.0 * direction.sign();
    vec![
        DriveCommand::Advance {
            distance_m: exit_distance_m,
        },
        DriveCommand::PointTurn { angle_deg: turn },
        DriveCommand::Advance {
            distance_m: inter_row_spacing_m,
        },
        DriveCommand::PointTurn { angle_deg: turn },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{normalize_angle, Point2};
    use crate::world::{DriveModel, RobotState, WheelSpeeds};

    fn row(angle_deg: f64, distance_px: f64) -> DetectedRow {
        DetectedRow {
            angle_deg,
            start_px: (0.0, 0.0),
            distance_from_center_px: distance_px,
            inter_row_spacing_px: None,
            votes: 50,
        }
    }

    #[test]
    fn aligned_row_is_a_noop() {
        let cmd = align_to_row(&row(0.0, 0.0), 0.625);
        assert!(cmd.is_noop(&NavConfig::default()));
    }

    #[test]
    fn align_turns_by_the_row_angle() {
        let cmd = align_to_row(&row(12.0, 0.0), 0.625);
        assert_eq!(cmd.turn_deg, 12.0);
    }

    #[test]
    fn align_scales_lateral_offset() {
        let cmd = align_to_row(&row(0.0, 150.0), 0.625);
        assert!((cmd.lateral_mm - 93.75).abs() < 1e-12);
    }

    #[test]
    fn small_error_keeps_straight() {
        // Detected angle -3 means heading error +3, below the threshold.
        let cfg = NavConfig::default();
        assert_eq!(follow_step(&cfg, &row(-3.0, 0.0)), FollowAction::Straight);
    }

    #[test]
    fn large_error_turns_by_the_difference() {
        // Heading error +8 -> detected angle -8 -> turn -8.
        let cfg = NavConfig::default();
        assert_eq!(
            follow_step(&cfg, &row(-8.0, 0.0)),
            FollowAction::CorrectiveTurn { angle_deg: -8.0 }
        );
    }

    #[test]
    fn exactly_five_degrees_stays_straight() {
        // "More than 5 degrees" is strict.
        let cfg = NavConfig::default();
        assert_eq!(follow_step(&cfg, &row(5.0, 0.0)), FollowAction::Straight);
        assert_ne!(follow_step(&cfg, &row(5.01, 0.0)), FollowAction::Straight);
    }

    /// Execute a command sequence exactly (continuous-time segments).
    fn execute(
        state: &RobotState,
        commands: &[DriveCommand],
        drive: &DriveModel,
    ) -> RobotState {
        let mut s = *state;
        let cruise = 40.0; // cm/s
        let omega = 30f64.to_radians(); // rad/s point turn
        for cmd in commands {
            match *cmd {
                DriveCommand::Advance { distance_m } => {
                    if distance_m.abs() > 0.0 {
                        let dt = distance_m.abs() / (cruise / 100.0);
                        let v = cruise * distance_m.signum();
                        s = drive.advance(&s, WheelSpeeds::straight(v), dt);
                    }
                }
                DriveCommand::PointTurn { angle_deg } => {
                    if angle_deg.abs() > 0.0 {
                        let dt = angle_deg.abs().to_radians() / omega;
                        let w = drive.point_turn_speeds(omega * angle_deg.signum());
                        s = drive.advance(&s, w, dt);
                    }
                }
            }
        }
        s
    }

    #[test]
    fn maneuver_reverses_heading_and_shifts_by_spacing() {
        let drive = DriveModel::default();
        let start = RobotState::at(Point2::new(2.0, 0.5), 0.0);
        let cmds = end_of_row_maneuver(0.5, TurnDirection::Left, 0.5);
        let end = execute(&start, &cmds, &drive);
        // Entry heading 0 -> final heading pi; lateral displacement 0.5 m.
        assert!((normalize_angle(end.heading_rad - std::f64::consts::PI)).abs() < 1e-9);
        assert!((end.position.y - 1.0).abs() < 1e-9);
        assert!((end.position.x - 2.5).abs() < 1e-9);
    }

    #[test]
    fn zero_spacing_is_a_u_turn_in_place() {
        let drive = DriveModel::default();
        let start = RobotState::at(Point2::new(0.0, 0.0), 0.0);
        let cmds = end_of_row_maneuver(0.0, TurnDirection::Right, 0.0);
        let end = execute(&start, &cmds, &drive);
        assert!((normalize_angle(end.heading_rad - std::f64::consts::PI)).abs() < 1e-9);
        assert!(end.position.x.abs() < 1e-9);
        assert!(end.position.y.abs() < 1e-9);
    }

    #[test]
    fn alternating_maneuvers_restore_heading_and_stack_laterally() {
        let drive = DriveModel::default();
        let start = RobotState::at(Point2::new(0.0, 0.0), 0.0);
        let first = end_of_row_maneuver(0.5, TurnDirection::Left, 0.3);
        let mid = execute(&start, &first, &drive);
        let second = end_of_row_maneuver(0.5, TurnDirection::Right, 0.3);
        let end = execute(&mid, &second, &drive);
        assert!(normalize_angle(end.heading_rad).abs() < 1e-9);
        assert!((end.position.y - 1.0).abs() < 1e-9, "two spacings of lateral offset");
    }
}
