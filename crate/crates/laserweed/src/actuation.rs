//! The three-axis laser gantry: per-axis resolution math, step
//! quantization, motion execution, homing, ultrasonic depth descent and
//! timed firing.
//!
//! The x axis is a timing belt (pitch `p`, pulley teeth `t`), y and z are
//! lead screws (the y axis has two synchronized motors). One microstep
//! moves the carriage `p * t / (N * m)` millimeters, which gives 0.0125 mm
//! on the belt axis and 0.000625 mm on the screw axes for the reference
//! drive parameters.
//!
//! Planning is absolute: every plan recomputes step counts from the homed
//! origin toward an absolute target, so quantization residuals never
//! accumulate across moves.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Drive mechanism of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveKind {
    Belt,
    LeadScrew,
}

/// One gantry axis.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct AxisConfig {
    pub drive: DriveKind,
    /// Belt pitch or screw lead, mm.
    pub pitch_mm: f64,
    /// Pulley teeth; 1 for lead screws.
    pub teeth: u32,
    /// Full motor steps per revolution.
    pub steps_per_rev: u32,
    /// Driver micro-stepping factor.
    pub microstepping: u32,
    /// Working length, mm.
    pub travel_mm: f64,
    /// Two synchronized motors driving the same axis.
    pub dual_motor: bool,
    /// Commanded step rate, microsteps per second.
    pub step_rate_hz: f64,
    /// Standard deviation of the mechanical placement error of the carriage,
    /// mm. Belt elasticity makes this larger on x than on the screw axes.
    pub jitter_sigma_mm: f64,
}

impl Default for AxisConfig {
    fn default() -> Self {
        AxisConfig::belt_x()
    }
}

impl AxisConfig {
    /// Reference belt x axis: p=2 mm, t=20, N=200, m=16.
    pub fn belt_x() -> Self {
        AxisConfig {
            drive: DriveKind::Belt,
            pitch_mm: 2.0,
            teeth: 20,
            steps_per_rev: 200,
            microstepping: 16,
            travel_mm: 400.0,
            dual_motor: false,
            step_rate_hz: 12_000.0,
            jitter_sigma_mm: 1.6,
        }
    }

    /// Reference dual-screw y axis: lead 2 mm, N=200, m=16.
    pub fn screw_y() -> Self {
        AxisConfig {
            drive: DriveKind::LeadScrew,
            pitch_mm: 2.0,
            teeth: 1,
            steps_per_rev: 200,
            microstepping: 16,
            travel_mm: 300.0,
            dual_motor: true,
            step_rate_hz: 40_000.0,
            jitter_sigma_mm: 0.9,
        }
    }

    /// Reference single-screw z axis.
    pub fn screw_z() -> Self {
        AxisConfig {
            travel_mm: 300.0,
            dual_motor: false,
            step_rate_hz: 80_000.0,
            jitter_sigma_mm: 0.0,
            ..AxisConfig::screw_y()
        }
    }

    /// Carriage travel per microstep: `(pitch * teeth) / (N * m)` mm.
    pub fn resolution_mm(&self) -> f64 {
        (self.pitch_mm * self.teeth as f64)
            / (self.steps_per_rev as f64 * self.microstepping as f64)
    }
}

/// Free-function form of [`AxisConfig::resolution_mm`].
pub fn axis_resolution(axis: &AxisConfig) -> f64 {
    axis.resolution_mm()
}

/// Laser emitter parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct LaserConfig {
    pub power_w: f64,
    pub wavelength_nm: f64,
    pub exposure_s: f64,
    /// Height of the exit aperture above the weed top when firing, mm.
    pub standoff_mm: f64,
    /// Added to the stem radius when judging a kill; proxy for the laser
    /// spot radius.
    pub kill_margin_mm: f64,
}

impl Default for LaserConfig {
    fn default() -> Self {
        LaserConfig {
            power_w: 2.5,
            wavelength_nm: 450.0,
            exposure_s: 2.0,
            standoff_mm: 50.0,
            kill_margin_mm: 1.0,
        }
    }
}

/// The full three-axis gantry.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct GantryConfig {
    pub x: AxisConfig,
    pub y: AxisConfig,
    pub z: AxisConfig,
    pub laser: LaserConfig,
    /// Ultrasonic depth sensor noise when measuring weed height, mm.
    pub ultrasonic_sigma_mm: f64,
    /// Horizontal radius within which the ultrasonic sensor registers a
    /// weed below the laser, mm.
    pub sensing_radius_mm: f64,
    /// When false, moves realize the requested displacement exactly
    /// (infinite-resolution override for perfect-system baselines).
    pub quantize: bool,
}

impl Default for GantryConfig {
    fn default() -> Self {
        GantryConfig {
            x: AxisConfig::belt_x(),
            y: AxisConfig::screw_y(),
            z: AxisConfig::screw_z(),
            laser: LaserConfig::default(),
            ultrasonic_sigma_mm: 1.0,
            sensing_radius_mm: 10.0,
            quantize: true,
        }
    }
}

impl GantryConfig {
    pub fn axes(&self) -> [&AxisConfig; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub const AXIS_NAMES: [char; 3] = ['x', 'y', 'z'];
}

/// Quantized step command for one move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    /// Signed microstep counts per axis.
    pub steps: [i64; 3],
    /// Displacement actually realized: `steps * resolution`, mm.
    pub realized_mm: [f64; 3],
    /// `requested - realized` per axis, mm; bounded by resolution/2.
    pub residual_mm: [f64; 3],
    /// Time to execute, s: the slowest axis dominates.
    pub duration_s: f64,
}

impl StepPlan {
    /// Step counts per physical motor. The dual-screw y axis always sends
    /// identical counts to both of its motors.
    pub fn motor_steps(&self, config: &GantryConfig) -> Vec<(&'static str, i64)> {
        let mut out = vec![("x", self.steps[0])];
        if config.y.dual_motor {
            out.push(("y_left", self.steps[1]));
            out.push(("y_right", self.steps[1]));
        } else {
            out.push(("y", self.steps[1]));
        }
        out.push(("z", self.steps[2]));
        out
    }
}

/// Gantry carriage state. Position is in the gantry frame, mm, with the
/// homed origin at (0, 0, 0); z is the height of the laser aperture above
/// the ground plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GantryState {
    pub position_mm: [f64; 3],
    pub homed: bool,
    pub laser_on: bool,
    pub limit_hit: [bool; 3],
    pub clock_s: f64,
}

impl GantryState {
    pub fn unhomed() -> Self {
        GantryState {
            position_mm: [0.0; 3],
            homed: false,
            laser_on: false,
            limit_hit: [false; 3],
            clock_s: 0.0,
        }
    }
}

/// Drive every axis to its limit switch and zero the position.
pub fn home(state: &GantryState) -> GantryState {
    GantryState {
        position_mm: [0.0; 3],
        homed: true,
        laser_on: false,
        limit_hit: [false; 3],
        clock_s: state.clock_s,
    }
}

/// Round half away from zero, the documented tie-break for step counts.
fn quantize_steps(delta_mm: f64, resolution_mm: f64) -> i64 {
    (delta_mm / resolution_mm).round() as i64
}

/// Plan a move from the current position to an absolute target.
///
/// Steps are `round(delta / resolution)` with ties away from zero, so the
/// realized position is always within half a resolution of the target.
pub fn plan_move(config: &GantryConfig, state: &GantryState, target_mm: [f64; 3]) -> Result<StepPlan> {
    if !state.homed {
        return Err(Error::NotHomed("move"));
    }
    let mut steps = [0i64; 3];
    let mut realized = [0.0f64; 3];
    let mut residual = [0.0f64; 3];
    let mut duration = 0.0f64;
    for (i, axis) in config.axes().iter().enumerate() {
        let target = target_mm[i];
        if target < 0.0 || target > axis.travel_mm {
            return Err(Error::AxisOutOfRange {
                axis: GantryConfig::AXIS_NAMES[i],
                target_mm: target,
                travel_mm: axis.travel_mm,
            });
        }
        let delta = target - state.position_mm[i];
        if config.quantize {
            let res = axis.resolution_mm();
            steps[i] = quantize_steps(delta, res);
            realized[i] = steps[i] as f64 * res;
        } else {
            steps[i] = quantize_steps(delta, axis.resolution_mm());
            realized[i] = delta;
        }
        residual[i] = delta - realized[i];
        duration = duration.max(steps[i].unsigned_abs() as f64 / axis.step_rate_hz);
    }
    Ok(StepPlan {
        steps,
        realized_mm: realized,
        residual_mm: residual,
        duration_s: duration,
    })
}

/// Execute a plan: advance the position by the realized displacement and
/// the clock by the plan duration. A virtual limit switch truncates motion
/// at the ends of travel and records the trip; that is state, not an error.
pub fn execute_plan(config: &GantryConfig, state: &GantryState, plan: &StepPlan) -> Result<GantryState> {
    if !state.homed {
        return Err(Error::NotHomed("execute"));
    }
    let mut next = *state;
    for i in 0..3 {
        let raw = state.position_mm[i] + plan.realized_mm[i];
        let travel = config.axes()[i].travel_mm;
        let clamped = raw.clamp(0.0, travel);
        next.limit_hit[i] = raw != clamped;
        next.position_mm[i] = clamped;
    }
    next.clock_s += plan.duration_s;
    Ok(next)
}

/// Move to an absolute target in one call.
pub fn move_to(config: &GantryConfig, state: &GantryState, target_mm: [f64; 3]) -> Result<GantryState> {
    let plan = plan_move(config, state, target_mm)?;
    execute_plan(config, state, &plan)
}

/// Result of an ultrasonic descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DescentOutcome {
    /// Laser aperture stopped `standoff` above the measured weed top.
    Detected { final_z_mm: f64 },
    /// Nothing under the sensor; descent ran to the z travel limit.
    NoDetection,
}

/// Lower the laser until the ultrasonic sensor reports the weed, leaving
/// the aperture `standoff_mm` above the measured top.
///
/// `weed_top_mm` is the true weed height when a weed sits inside the
/// sensing cone, `None` otherwise. The sensor reading carries Gaussian
/// noise with the given sigma; the realized height is then also subject to
/// z-axis step quantization.
pub fn descend_to_weed<R: Rng>(
    config: &GantryConfig,
    state: &GantryState,
    weed_top_mm: Option<f64>,
    ultrasonic_sigma_mm: f64,
    rng: &mut R,
) -> Result<(GantryState, DescentOutcome)> {
    if !state.homed {
        return Err(Error::NotHomed("descent"));
    }
    match weed_top_mm {
        None => {
            // Descend to the bottom of travel; the limit switch stops us.
            let plan = plan_move(config, state, [
                state.position_mm[0],
                state.position_mm[1],
                0.0,
            ])?;
            let mut next = execute_plan(config, state, &plan)?;
            next.limit_hit[2] = true;
            Ok((next, DescentOutcome::NoDetection))
        }
        Some(top_mm) => {
            let noise = if ultrasonic_sigma_mm > 0.0 {
                Normal::new(0.0, ultrasonic_sigma_mm)
                    .expect("sigma > 0")
                    .sample(rng)
            } else {
                0.0
            };
            let measured_top = top_mm + noise;
            let target_z = (measured_top + config.laser.standoff_mm)
                .clamp(0.0, config.z.travel_mm);
            let next = move_to(config, state, [
                state.position_mm[0],
                state.position_mm[1],
                target_z,
            ])?;
            Ok((
                next,
                DescentOutcome::Detected {
                    final_z_mm: next.position_mm[2],
                },
            ))
        }
    }
}

/// Where the beam actually landed, and whether it killed the weed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FireResult {
    /// Beam impact point in the gantry xy plane, mm.
    pub spot_mm: [f64; 2],
    /// Horizontal distance from the impact point to the stem center, mm.
    pub offset_mm: f64,
    pub hit: bool,
}

/// Fire the laser for the configured exposure at the current xy position.
///
/// The beam lands at the carriage position plus per-axis mechanical jitter;
/// the weed dies when the impact point is within `stem_radius + kill_margin`
/// of the stem center. Firing before homing is a safety error.
pub fn fire<R: Rng>(
    config: &GantryConfig,
    state: &GantryState,
    stem_center_mm: [f64; 2],
    stem_radius_mm: f64,
    rng: &mut R,
) -> Result<(GantryState, FireResult)> {
    if !state.homed {
        return Err(Error::NotHomed("fire"));
    }
    let mut spot = [state.position_mm[0], state.position_mm[1]];
    for (i, sigma) in [config.x.jitter_sigma_mm, config.y.jitter_sigma_mm]
        .into_iter()
        .enumerate()
    {
        if sigma > 0.0 {
            spot[i] += Normal::new(0.0, sigma).expect("sigma > 0").sample(rng);
        }
    }
    let offset = (spot[0] - stem_center_mm[0]).hypot(spot[1] - stem_center_mm[1]);
    let hit = offset <= stem_radius_mm + config.laser.kill_margin_mm;
    let mut next = *state;
    next.clock_s += config.laser.exposure_s;
    Ok((
        next,
        FireResult {
            spot_mm: spot,
            offset_mm: offset,
            hit,
        },
    ))
}
