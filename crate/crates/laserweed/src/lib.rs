//! Deterministic simulation and control stack for a laser weeding robot.
//!
//! The robot under simulation is a six-wheeled skid-steer platform with a
//! double four-bar suspension, a three-axis stepper gantry carrying a
//! 450 nm laser, and two calibrated cameras: a forward camera for crop-row
//! following and a downward camera for weed detection. The crate models
//! each subsystem at desk scale and reproduces the platform's speed-sweep,
//! positional-accuracy and obstacle-stability studies:
//!
//! * [`world`] — field scenarios (rows, weeds, obstacles) and skid-steer
//!   pose integration, all seeded and deterministic.
//! * [`kinematics`] — closed-form four-bar position analysis, maximum wheel
//!   lift, and the obstacle traversal model.
//! * [`actuation`] — per-axis gantry resolution, step quantization, homing,
//!   ultrasonic descent and timed firing.
//! * [`vision`] — from-scratch raster pipeline: HSV conversion, Gaussian
//!   blur, Canny edges, morphology, contour moments, Hough lines, geometric
//!   weed classification and laser-spot detection.
//! * [`navigation`] — the row-following controller and the full mission
//!   loop with its event log.
//! * [`experiments`] — the speed-sweep, accuracy and stability studies with
//!   least-squares fits and CSV/SVG reports.
//! * [`config`] — layered TOML configuration for the CLI.
//!
//! Every stochastic component draws from a seeded ChaCha stream, so a run
//! is a pure function of its configuration and seed.

pub mod actuation;
pub mod vision;
pub mod error;
pub mod geom;
pub mod kinematics;
pub mod navigation;
pub mod world;

pub use error::{Error, Result};
