//! The full mission loop: align, follow rows while detecting weeds, stop
//! to engage each new weed with the gantry, change rows at the end, and
//! log everything with timestamps.

use crate::actuation::{
    descend_to_weed, fire, home, move_to, DescentOutcome, GantryConfig, GantryState,
};
use crate::error::{Error, Result};
use crate::geom::{normalize_angle, rad_to_deg, Point2};
use crate::navigation::{
    align_to_row, end_of_row_maneuver, follow_step, DriveCommand, FollowAction, NavConfig,
    NavMode, NavState, TurnDirection,
};
use crate::vision::render::{render_view, CameraModel, Overlay, LASER_SPOT_RADIUS_M, LASER_SPOT_RGB};
use crate::vision::{
    detect_laser_spot, detect_rows, detect_weeds, mirror_transform, select_row, VisionConfig,
    WorkAreaCalibration,
};
use crate::world::{DriveModel, FieldScenario, RobotState, WheelSpeeds};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// Corrective turns beyond this are treated as misdetections.
const MAX_CORRECTIVE_TURN_DEG: f64 = 25.0;

/// Whether the gantry fires the weeding laser or only marks targets
/// (the speed-sweep methodology keeps weed density constant by
/// substituting a pointer for the laser).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FireMode {
    Laser,
    Marker,
}

/// Everything a mission needs beyond the scenario itself.
#[derive(Debug, Clone)]
pub struct MissionConfig {
    pub speed_cm_s: f64,
    pub seed: u64,
    pub fire_mode: FireMode,
    /// Measure per-weed positional error through the mirrored camera.
    pub measure_accuracy: bool,
    /// Control/detection cycles per second.
    pub frame_rate_hz: f64,
    /// Point-turn rate, deg/s.
    pub angular_speed_deg_s: f64,
    /// Ground-truth match radius when crediting detections, m.
    pub match_radius_m: f64,
    /// Abort when no progress happens for this long, s.
    pub stuck_timeout_s: f64,
    /// Gantry z position between engagements, mm.
    pub park_z_mm: f64,
    /// Fixed handling cycle per target: the controller dwells out the
    /// remainder after travel, descent and exposure, so every engagement
    /// costs the same and mission timing is schedulable.
    pub target_cycle_s: f64,
    /// A target must be sighted this many times before the robot stops
    /// for it; debounces single-frame pipeline artifacts.
    pub sightings_required: u32,
    pub nav: NavConfig,
    pub drive: DriveModel,
    pub gantry: GantryConfig,
    pub vision: VisionConfig,
    pub down_camera: CameraModel,
    pub front_camera: CameraModel,
    pub mirror_camera: CameraModel,
}

impl MissionConfig {
    pub fn new(speed_cm_s: f64, seed: u64) -> Self {
        MissionConfig {
            speed_cm_s,
            seed,
            fire_mode: FireMode::Laser,
            measure_accuracy: false,
            frame_rate_hz: 5.0,
            angular_speed_deg_s: 30.0,
            match_radius_m: 0.025,
            stuck_timeout_s: 60.0,
            park_z_mm: 210.0,
            target_cycle_s: 10.0,
            sightings_required: 2,
            nav: NavConfig::default(),
            drive: DriveModel::default(),
            gantry: GantryConfig::default(),
            vision: VisionConfig::default(),
            down_camera: CameraModel::downward(),
            front_camera: CameraModel::forward(),
            mirror_camera: CameraModel::mirrored(),
        }
    }
}

/// One timestamped log line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogEvent {
    pub t_s: f64,
    pub event: String,
    pub x_m: f64,
    pub y_m: f64,
    pub heading_rad: f64,
    pub detail: String,
}

/// One laser (or marker) engagement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Engagement {
    /// Index into the scenario's weed list; `None` for a spurious target.
    pub weed_index: Option<usize>,
    /// Detected centroid, full-frame pixels of the downward camera.
    pub detected_px: (f64, f64),
    /// Gantry xy the laser was sent to, mm.
    pub aim_mm: [f64; 2],
    /// Where the beam landed, mm.
    pub spot_mm: [f64; 2],
    /// Horizontal distance from the beam to the true stem center, mm.
    pub offset_to_stem_mm: f64,
    pub hit: bool,
    /// (ex, ey, e) measured through the mirrored camera, mm.
    pub measured_error_mm: Option<(f64, f64, f64)>,
}

/// Mission outcome: the event log plus per-weed bookkeeping.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MissionLog {
    pub events: Vec<LogEvent>,
    pub engagements: Vec<Engagement>,
    pub detected_weeds: BTreeSet<usize>,
    pub eliminated_weeds: BTreeSet<usize>,
    pub total_weeds: usize,
    pub drive_time_s: f64,
    pub stop_time_s: f64,
    pub distance_covered_m: f64,
    pub rows_completed: usize,
    pub aborted: Option<String>,
}

impl MissionLog {
    pub fn total_time_s(&self) -> f64 {
        self.drive_time_s + self.stop_time_s
    }

    pub fn detection_rate(&self) -> f64 {
        if self.total_weeds == 0 {
            return 1.0;
        }
        self.detected_weeds.len() as f64 / self.total_weeds as f64
    }

    /// Eliminated over detected. Marker-mode engagements count a would-be
    /// hit as eliminated for this statistic.
    pub fn hit_rate(&self) -> f64 {
        if self.detected_weeds.is_empty() {
            return 1.0;
        }
        self.eliminated_weeds.len() as f64 / self.detected_weeds.len() as f64
    }

    /// Seconds of operation per meter of row covered.
    pub fn weeding_time_s_per_m(&self) -> f64 {
        self.total_time_s() / self.distance_covered_m
    }

    /// The event log as CSV with columns (t, event, x, y, heading, detail).
    pub fn events_csv(&self) -> String {
        let mut out = String::from("t_s,event,x_m,y_m,heading_rad,detail\n");
        for e in &self.events {
            let detail = if e.detail.contains(',') || e.detail.contains('"') {
                format!("\"{}\"", e.detail.replace('"', "\"\""))
            } else {
                e.detail.clone()
            };
            let _ = writeln!(
                out,
                "{:.3},{},{:.6},{:.6},{:.6},{}",
                e.t_s, e.event, e.x_m, e.y_m, e.heading_rad, detail
            );
        }
        out
    }
}

struct Mission<'a> {
    cfg: &'a MissionConfig,
    scenario: FieldScenario,
    robot: RobotState,
    nav: NavState,
    gantry: GantryState,
    gantry_rng: ChaCha8Rng,
    log: MissionLog,
    calibration: WorkAreaCalibration,
    frame_counter: u64,
    /// World positions of engaged spurious detections (dedup).
    spurious_targets: Vec<Point2>,
    /// Sighting accumulator: (world position, times seen).
    candidates: Vec<(Point2, u32)>,
    last_progress_clock: f64,
    last_odometer: f64,
    row_sign: f64,
}

/// Run a full weeding mission over the scenario.
///
/// The loop is single-threaded and deterministic: align with the row
/// closest to center, follow it with the 5-degree feedback rule while the
/// weed pipeline runs every frame period, stop to engage each newly
/// detected weed, and change rows with the two-point-turn maneuver when
/// the Hough result comes back empty. Ends after `nav.max_rows` rows.
/// When no progress is made for the stuck timeout the mission aborts:
/// the returned log carries the diagnostic in `aborted` and ends with an
/// `abort` event.
pub fn run_mission(scenario: &FieldScenario, cfg: &MissionConfig) -> Result<MissionLog> {
    if scenario.rows.is_empty() {
        return Err(Error::InvalidScenario("mission needs at least one row".into()));
    }
    let first_row = &scenario.rows[0];
    let start = Point2::new(first_row.start.x - 0.35, first_row.start.y);
    let robot = RobotState::at(start, 0.0);
    run_mission_from(scenario, cfg, robot)
}

/// As [`run_mission`], but from an explicit start pose (used by the
/// stability study and the controller property tests).
pub fn run_mission_from(
    scenario: &FieldScenario,
    cfg: &MissionConfig,
    robot: RobotState,
) -> Result<MissionLog> {
    let mut mission = Mission {
        cfg,
        scenario: scenario.clone(),
        robot,
        nav: NavState::new(),
        gantry: home(&GantryState::unhomed()),
        gantry_rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15),
        log: MissionLog {
            total_weeds: scenario.weed_count(),
            ..MissionLog::default()
        },
        calibration: WorkAreaCalibration::from_camera(&cfg.down_camera),
        frame_counter: 0,
        spurious_targets: Vec::new(),
        candidates: Vec::new(),
        last_progress_clock: 0.0,
        last_odometer: 0.0,
        row_sign: 1.0,
    };
    mission.gantry = move_to(&cfg.gantry, &mission.gantry, [0.0, 0.0, cfg.park_z_mm])?;
    mission.run()?;
    Ok(mission.log)
}

impl Mission<'_> {
    fn run(&mut self) -> Result<()> {
        self.event("start", String::new());
        loop {
            match self.nav.mode {
                NavMode::Aligning => self.step_aligning()?,
                NavMode::Following => self.step_following()?,
                NavMode::Exiting => self.step_exiting()?,
                NavMode::Turning => self.step_turning()?,
                NavMode::Done => break,
            }
            if let Some(reason) = self.stuck_check() {
                self.log.rows_completed = self.nav.rows_completed;
                self.log.aborted = Some(reason.clone());
                self.event("abort", reason);
                return Ok(());
            }
        }
        self.log.rows_completed = self.nav.rows_completed;
        self.event("mission_complete", format!("rows={}", self.nav.rows_completed));
        Ok(())
    }

    fn event(&mut self, event: &str, detail: String) {
        self.log.events.push(LogEvent {
            t_s: self.robot.clock_s,
            event: event.to_string(),
            x_m: self.robot.position.x,
            y_m: self.robot.position.y,
            heading_rad: self.robot.heading_rad,
            detail,
        });
    }

    fn stuck_check(&mut self) -> Option<String> {
        if self.robot.odometer_m > self.last_odometer + 1e-6 {
            self.last_odometer = self.robot.odometer_m;
            self.last_progress_clock = self.robot.clock_s;
            return None;
        }
        if self.robot.clock_s - self.last_progress_clock > self.cfg.stuck_timeout_s {
            return Some(format!(
                "no progress for {:.1} s at x={:.2} y={:.2} mode={:?}",
                self.robot.clock_s - self.last_progress_clock,
                self.robot.position.x,
                self.robot.position.y,
                self.nav.mode
            ));
        }
        None
    }

    fn frame_seed(&mut self, stream: u64) -> u64 {
        self.frame_counter += 1;
        self.cfg
            .seed
            .wrapping_mul(0x100_0000_01b3)
            .wrapping_add(self.frame_counter)
            .wrapping_add(stream << 56)
    }

    /// Stop-turn-resume point turn; the turn time counts as driving.
    fn point_turn(&mut self, angle_deg: f64) {
        if angle_deg.abs() < 1e-9 {
            return;
        }
        let omega = self.cfg.angular_speed_deg_s.to_radians();
        let dt = angle_deg.abs().to_radians() / omega;
        let speeds = self
            .cfg
            .drive
            .point_turn_speeds(omega * angle_deg.signum());
        self.robot = self.cfg.drive.advance(&self.robot, speeds, dt);
        self.robot.linear_speed_cm_s = 0.0;
        self.log.drive_time_s += dt;
    }

    /// Straight segment of exact length; counts as driving and distance.
    fn advance_distance(&mut self, distance_m: f64) {
        if distance_m.abs() < 1e-12 {
            return;
        }
        let dt = distance_m.abs() / (self.cfg.speed_cm_s / 100.0);
        let v = self.cfg.speed_cm_s * distance_m.signum();
        self.robot = self.cfg.drive.advance(&self.robot, WheelSpeeds::straight(v), dt);
        self.log.drive_time_s += dt;
        self.log.distance_covered_m += distance_m.abs();
    }

    /// One frame period of straight driving.
    fn advance_frame(&mut self) {
        let dt = 1.0 / self.cfg.frame_rate_hz;
        self.robot = self.cfg.drive.advance(
            &self.robot,
            WheelSpeeds::straight(self.cfg.speed_cm_s),
            dt,
        );
        self.log.drive_time_s += dt;
        self.log.distance_covered_m += self.cfg.speed_cm_s / 100.0 * dt;
    }

    fn detect_rows_ahead(&mut self) -> Vec<crate::vision::DetectedRow> {
        let seed = self.frame_seed(1);
        let frame = render_view(
            &self.scenario,
            &self.robot,
            &self.cfg.front_camera,
            &[],
            seed,
        );
        detect_rows(&frame, &self.cfg.vision)
    }

    /// Steering view of a detected row: the reported angle becomes the
    /// bearing from the robot to the point where the row crosses the
    /// lookahead line. On the physical forward-perspective camera the row
    /// tilts by exactly this bearing (offset rows lean toward the
    /// vanishing point); the rectified simulation view reports line angle
    /// and offset separately, so the bearing is reconstructed here.
    /// Steering by it regulates heading and lateral drift together;
    /// steering by the raw line angle would never correct drift.
    fn steering_row(&self, row: &crate::vision::DetectedRow) -> crate::vision::DetectedRow {
        let cam = &self.cfg.front_camera;
        let (w, h) = cam.resolution_px;
        let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
        let theta = row.angle_deg.to_radians();
        // Where the row line crosses the image's center row (the ground
        // line one lookahead ahead of the robot).
        let rho = row.distance_from_center_px + cx * theta.cos() + cy * theta.sin();
        let crossing_px = if theta.cos().abs() > 0.2 {
            (rho - cy * theta.sin()) / theta.cos() - cx
        } else {
            row.distance_from_center_px
        };
        let lookahead_mm = cam.center_m.0 * 1000.0;
        let offset_mm = crossing_px * cam.mm_per_px_x();
        let bearing_deg = (offset_mm / lookahead_mm).atan().to_degrees();
        crate::vision::DetectedRow {
            angle_deg: bearing_deg,
            ..row.clone()
        }
    }

    fn step_aligning(&mut self) -> Result<()> {
        let rows = self.detect_rows_ahead();
        let Some(row) = select_row(&rows).cloned() else {
            // Nothing ahead: nudge forward and look again; the stuck guard
            // aborts if this never resolves.
            self.advance_distance(0.05);
            self.event("align_search", "no rows visible".into());
            return Ok(());
        };
        let cmd = align_to_row(&row, self.cfg.front_camera.mm_per_px_x());
        self.nav.heading_error_deg = -row.angle_deg;
        self.nav.target_row = Some(row);
        if cmd.turn_deg.abs() > 0.5 {
            self.point_turn(cmd.turn_deg);
            self.event("align_turn", format!("deg={:.2}", cmd.turn_deg));
        }
        if cmd.lateral_mm.abs() > self.cfg.nav.lateral_tolerance_mm {
            // Side-step: quarter turn toward the row, short advance, back.
            let side = cmd.lateral_mm.signum();
            self.point_turn(90.0 * side);
            self.advance_distance(cmd.lateral_mm.abs() / 1000.0);
            self.point_turn(-90.0 * side);
            self.event("align_shift", format!("mm={:.1}", cmd.lateral_mm));
        }
        self.nav.mode = NavMode::Following;
        self.event("following", String::new());
        Ok(())
    }

    fn step_following(&mut self) -> Result<()> {
        // A single frame is never trusted with an expensive decision: both
        // the end-of-row and a corrective turn must be confirmed by a
        // second read (fresh sensor noise, same pose) before acting.
        let rows = self.detect_rows_ahead();
        if rows.is_empty() {
            let confirm = self.detect_rows_ahead();
            if confirm.is_empty() {
                self.nav.rows_completed += 1;
                self.nav.mode = NavMode::Exiting;
                self.event(
                    "end_of_row",
                    format!("rows_completed={}", self.nav.rows_completed),
                );
                return Ok(());
            }
            self.event("row_blink", String::new());
            return Ok(());
        }
        let row = select_row(&rows).cloned().expect("non-empty");
        self.nav.heading_error_deg = -row.angle_deg;
        let steer = self.steering_row(&row);
        match follow_step(&self.cfg.nav, &steer) {
            FollowAction::CorrectiveTurn { .. } => {
                let confirm = self.detect_rows_ahead();
                let confirmed = select_row(&confirm).and_then(|second| {
                    match follow_step(&self.cfg.nav, &self.steering_row(second)) {
                        FollowAction::CorrectiveTurn { angle_deg }
                            if angle_deg.abs() <= MAX_CORRECTIVE_TURN_DEG =>
                        {
                            Some(angle_deg)
                        }
                        _ => None,
                    }
                });
                if let Some(angle_deg) = confirmed {
                    self.point_turn(angle_deg);
                    self.event("corrective_turn", format!("deg={:.2}", angle_deg));
                } else {
                    self.advance_frame();
                    self.scan_and_engage()?;
                }
            }
            FollowAction::Straight => {
                self.advance_frame();
                self.scan_and_engage()?;
            }
        }
        self.nav.target_row = Some(row);
        Ok(())
    }

    fn step_exiting(&mut self) -> Result<()> {
        // Drive the exit clearance frame by frame, still weeding: the row
        // is gone from the forward view but weeds remain below.
        let step = self.cfg.speed_cm_s / 100.0 / self.cfg.frame_rate_hz;
        let mut remaining = self.cfg.nav.exit_distance_m;
        while remaining > 1e-9 {
            let d = remaining.min(step);
            self.advance_distance(d);
            remaining -= d;
            self.scan_and_engage()?;
        }
        if self.nav.rows_completed >= self.cfg.nav.max_rows {
            self.nav.mode = NavMode::Done;
            self.event("exit_complete", "last row".into());
        } else {
            self.nav.mode = NavMode::Turning;
            self.event("exit_complete", String::new());
        }
        Ok(())
    }

    fn step_turning(&mut self) -> Result<()> {
        let direction = self.next_turn_direction();
        let spacing = self.current_row_spacing();
        // The exit clearance was already driven in the exiting state.
        let commands = end_of_row_maneuver(spacing, direction, 0.0);
        for cmd in commands {
            match cmd {
                DriveCommand::Advance { distance_m } => self.advance_distance(distance_m),
                DriveCommand::PointTurn { angle_deg } => self.point_turn(angle_deg),
            }
        }
        self.row_sign = -self.row_sign;
        self.nav.mode = NavMode::Aligning;
        self.event(
            "row_change",
            format!("direction={direction:?} spacing_m={spacing:.3}"),
        );
        Ok(())
    }

    /// Boustrophedon: turn toward the next row's side of the field.
    fn next_turn_direction(&self) -> TurnDirection {
        let next_idx = self.nav.rows_completed.min(self.scenario.rows.len() - 1);
        let target_y = self.scenario.rows[next_idx].start.y;
        let dy = target_y - self.robot.position.y;
        let heading = self.robot.heading_rad;
        // Cross product of heading direction with the desired lateral step.
        let cross = heading.cos() * dy.signum();
        if cross >= 0.0 {
            TurnDirection::Left
        } else {
            TurnDirection::Right
        }
    }

    fn current_row_spacing(&self) -> f64 {
        // Prefer the spacing measured by the Hough stage when a plausible
        // second row was visible; line-split artifacts measure a fraction
        // of a crop's width and are rejected.
        if let Some(row) = &self.nav.target_row {
            if let Some(px) = row.inter_row_spacing_px {
                let m = px * self.cfg.front_camera.mm_per_px_x() / 1000.0;
                if (0.25..=2.0).contains(&m) {
                    return m;
                }
            }
        }
        if self.scenario.rows.len() >= 2 {
            (self.scenario.rows[1].start.y - self.scenario.rows[0].start.y).abs()
        } else {
            0.5
        }
    }

    /// Render the downward view, run the weed pipeline, and engage every
    /// target that has accumulated enough sightings.
    fn scan_and_engage(&mut self) -> Result<()> {
        let seed = self.frame_seed(2);
        let frame = render_view(
            &self.scenario,
            &self.robot,
            &self.cfg.down_camera,
            &[],
            seed,
        );
        let capture_pose = self.robot;
        let detection = detect_weeds(&frame, None, &self.cfg.vision);
        if detection.centroids_px.is_empty() {
            return Ok(());
        }

        // Accumulate sightings per world position; a target is engaged on
        // reaching the required count, then never again.
        let mut new_targets: Vec<(Option<usize>, (f64, f64))> = Vec::new();
        for &c in &detection.centroids_px {
            let world = self.cfg.down_camera.pixel_to_world(&capture_pose, c);
            let sightings = match self
                .candidates
                .iter_mut()
                .find(|(p, _)| p.distance(world) <= self.cfg.match_radius_m)
            {
                Some((_, n)) => {
                    *n += 1;
                    *n
                }
                None => {
                    self.candidates.push((world, 1));
                    1
                }
            };
            if sightings != self.cfg.sightings_required.max(1) {
                continue;
            }
            let matched = self
                .scenario
                .weeds
                .iter()
                .enumerate()
                .filter(|(_, w)| w.position.distance(world) <= self.cfg.match_radius_m)
                .min_by(|a, b| {
                    a.1.position
                        .distance(world)
                        .partial_cmp(&b.1.position.distance(world))
                        .unwrap()
                })
                .map(|(i, _)| i);
            match matched {
                Some(i) => {
                    if self.log.detected_weeds.insert(i) {
                        new_targets.push((Some(i), c));
                    }
                }
                None => {
                    let seen = self
                        .spurious_targets
                        .iter()
                        .any(|p| p.distance(world) <= self.cfg.match_radius_m);
                    if !seen {
                        self.spurious_targets.push(world);
                        new_targets.push((None, c));
                    }
                }
            }
        }
        if new_targets.is_empty() {
            return Ok(());
        }

        // Work the batch in gantry order to bound carriage travel; the
        // pose stays the capture pose for the whole stop.
        new_targets.sort_by(|a, b| {
            (a.1 .1, a.1 .0)
                .partial_cmp(&(b.1 .1, b.1 .0))
                .unwrap()
        });
        self.robot.linear_speed_cm_s = 0.0;
        self.event("stop_detect", format!("targets={}", new_targets.len()));
        let stop_started = self.gantry.clock_s;
        for (weed_idx, centroid) in new_targets {
            self.engage(weed_idx, centroid, &capture_pose)?;
        }
        let stop_duration = self.gantry.clock_s - stop_started;
        self.robot.clock_s += stop_duration;
        self.log.stop_time_s += stop_duration;
        // Weeding stops are planned idle time, not lack of progress.
        self.last_progress_clock += stop_duration;
        self.event("resume", String::new());
        Ok(())
    }

    fn engage(
        &mut self,
        weed_idx: Option<usize>,
        centroid_px: (f64, f64),
        capture_pose: &RobotState,
    ) -> Result<()> {
        let cycle_started = self.gantry.clock_s;
        let aim = self.calibration.pixel_to_gantry(centroid_px);
        // Move above the target at park height, then descend on the
        // ultrasonic sensor.
        self.gantry = move_to(
            &self.cfg.gantry,
            &self.gantry,
            [aim[0], aim[1], self.cfg.park_z_mm],
        )?;

        // The ultrasonic sensor sees whatever true weed sits inside its
        // sensing cone below the laser.
        let laser_world = self.cfg.down_camera.pixel_to_world(
            capture_pose,
            self.calibration.gantry_to_pixel([
                self.gantry.position_mm[0],
                self.gantry.position_mm[1],
            ]),
        );
        let under_sensor = self
            .scenario
            .weeds
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                !w.eliminated
                    && w.position.distance(laser_world)
                        <= self.cfg.gantry.sensing_radius_mm / 1000.0
            })
            .min_by(|a, b| {
                a.1.position
                    .distance(laser_world)
                    .partial_cmp(&b.1.position.distance(laser_world))
                    .unwrap()
            })
            .map(|(i, w)| (i, w.height_m * 1000.0));

        let (descended, outcome) = descend_to_weed(
            &self.cfg.gantry,
            &self.gantry,
            under_sensor.map(|(_, h)| h),
            self.cfg.gantry.ultrasonic_sigma_mm,
            &mut self.gantry_rng,
        )?;
        self.gantry = descended;

        if outcome == DescentOutcome::NoDetection {
            self.event(
                "unreachable",
                format!("px=({:.1},{:.1}) no target under sensor", centroid_px.0, centroid_px.1),
            );
            self.gantry = move_to(
                &self.cfg.gantry,
                &self.gantry,
                [
                    self.gantry.position_mm[0],
                    self.gantry.position_mm[1],
                    self.cfg.park_z_mm,
                ],
            )?;
            let cycle_end = cycle_started + self.cfg.target_cycle_s;
            if self.gantry.clock_s < cycle_end {
                self.gantry.clock_s = cycle_end;
            }
            return Ok(());
        }

        // True stem center in gantry coordinates for the kill test.
        let stem_weed = weed_idx.or(under_sensor.map(|(i, _)| i));
        let (stem_mm, stem_radius_mm) = match stem_weed {
            Some(i) => {
                let w = &self.scenario.weeds[i];
                let px = self.cfg.down_camera.world_to_pixel(capture_pose, w.position);
                let g = self.calibration.pixel_to_gantry(px);
                (g, w.stem_radius_m * 1000.0)
            }
            // Spurious target: no stem anywhere near; guaranteed miss.
            None => ([f64::INFINITY, f64::INFINITY], 0.0),
        };

        let (after_fire, result) = fire(
            &self.cfg.gantry,
            &self.gantry,
            stem_mm,
            stem_radius_mm,
            &mut self.gantry_rng,
        )?;
        self.gantry = after_fire;

        if result.hit {
            if let Some(i) = stem_weed {
                self.log.eliminated_weeds.insert(i);
                if self.cfg.fire_mode == FireMode::Laser {
                    self.scenario.weeds[i].eliminated = true;
                }
            }
        }

        let measured = if self.cfg.measure_accuracy {
            self.measure_spot(capture_pose, aim, result.spot_mm)
        } else {
            None
        };

        self.log.engagements.push(Engagement {
            weed_index: stem_weed,
            detected_px: centroid_px,
            aim_mm: aim,
            spot_mm: result.spot_mm,
            offset_to_stem_mm: result.offset_mm,
            hit: result.hit,
            measured_error_mm: measured,
        });
        self.event(
            if result.hit { "fire_hit" } else { "fire_miss" },
            format!(
                "weed={:?} aim=({:.2},{:.2}) offset_mm={:.3}",
                stem_weed, aim[0], aim[1], result.offset_mm
            ),
        );

        // Retract to park height, then dwell out the fixed handling cycle.
        self.gantry = move_to(
            &self.cfg.gantry,
            &self.gantry,
            [
                self.gantry.position_mm[0],
                self.gantry.position_mm[1],
                self.cfg.park_z_mm,
            ],
        )?;
        let cycle_end = cycle_started + self.cfg.target_cycle_s;
        if self.gantry.clock_s < cycle_end {
            self.gantry.clock_s = cycle_end;
        }
        Ok(())
    }

    /// Render the mirrored camera with the impact spot, detect it, map it
    /// back through the mirror transform and compare against the aim point.
    fn measure_spot(
        &mut self,
        capture_pose: &RobotState,
        aim_mm: [f64; 2],
        spot_mm: [f64; 2],
    ) -> Option<(f64, f64, f64)> {
        let spot_world = self.cfg.down_camera.pixel_to_world(
            capture_pose,
            self.calibration.gantry_to_pixel(spot_mm),
        );
        let seed = self.frame_seed(3);
        // The robot is stationary while firing; no motion blur.
        let mut still_pose = *capture_pose;
        still_pose.linear_speed_cm_s = 0.0;
        let frame = render_view(
            &self.scenario,
            &still_pose,
            &self.cfg.mirror_camera,
            &[Overlay {
                position: spot_world,
                radius_m: LASER_SPOT_RADIUS_M,
                rgb: LASER_SPOT_RGB,
            }],
            seed,
        );
        let spot_px = detect_laser_spot(&frame, &self.cfg.vision)?;
        let primary_px = mirror_transform(
            spot_px,
            (
                self.cfg.mirror_camera.resolution_px.0,
                self.cfg.mirror_camera.resolution_px.1,
            ),
        );
        let measured_mm = self.calibration.pixel_to_gantry(primary_px);
        let ex = measured_mm[0] - aim_mm[0];
        let ey = measured_mm[1] - aim_mm[1];
        Some((ex, ey, ex.hypot(ey)))
    }
}

/// Heading error of the robot against the nearest row, degrees.
/// Convenience for tests and the stability study.
pub fn heading_error_vs_row(scenario: &FieldScenario, robot: &RobotState) -> f64 {
    let row = scenario
        .rows
        .iter()
        .min_by(|a, b| {
            a.lateral_distance(robot.position)
                .partial_cmp(&b.lateral_distance(robot.position))
                .unwrap()
        })
        .expect("at least one row");
    let row_angle = row.direction.y.atan2(row.direction.x);
    let diff = normalize_angle(robot.heading_rad - row_angle);
    // Rows are undirected: fold onto (-90, 90].
    let folded = if diff > std::f64::consts::FRAC_PI_2 {
        diff - std::f64::consts::PI
    } else if diff <= -std::f64::consts::FRAC_PI_2 {
        diff + std::f64::consts::PI
    } else {
        diff
    };
    rad_to_deg(folded)
}
