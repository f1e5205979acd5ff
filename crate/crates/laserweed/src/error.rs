//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by scenario construction, kinematics, gantry planning
/// and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Scenario or configuration rejected before any simulation ran.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// The four-bar loop cannot close for the given link lengths
    /// (arcsine argument left [-1, 1]).
    #[error("link geometry error: arcsine argument {0:.4} outside [-1, 1]; mechanism cannot close")]
    LinkGeometry(f64),

    /// A gantry move was requested outside the axis working length.
    #[error("{axis}-axis target {target_mm:.3} mm outside travel [0, {travel_mm:.3}] mm")]
    AxisOutOfRange {
        axis: char,
        target_mm: f64,
        travel_mm: f64,
    },

    /// A motion or firing command was issued before homing.
    #[error("gantry is not homed; {0} refused")]
    NotHomed(&'static str),

    /// Least-squares fit attempted on degenerate data.
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),

    /// The mission made no progress for longer than the stuck timeout.
    #[error("mission stuck: {0}")]
    MissionStuck(String),

    /// Malformed image file or unsupported format variant.
    #[error("image format error: {0}")]
    ImageFormat(String),

    /// Configuration file could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
