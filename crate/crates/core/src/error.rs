//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// The mirror-geometry coupling formula has a non-positive denominator.
    #[error("geometry out of domain: {0}")]
    Geometry(String),

    /// The pump specification is inconsistent with the other parameters.
    #[error("inconsistent pump: {0}")]
    Pump(String),

    /// Response denominator vanishes (gamma_m = 0, x = 0, G = 0).
    #[error("singular probe response: gamma_m = 0, x = 0 and G = 0")]
    SingularResponse,

    /// Requested time step exceeds the stability cap for the integrator.
    #[error("time step {dt:e} exceeds cap {cap:e}")]
    TimeStep { dt: f64, cap: f64 },

    /// Integration produced a non-finite state.
    #[error("integration diverged: non-finite state at t = {t:e}")]
    NonFinite { t: f64 },

    /// An operation that normalizes by the probe input got zero input.
    #[error("zero total probe input")]
    ZeroInput,
}

pub type Result<T> = std::result::Result<T, Error>;
