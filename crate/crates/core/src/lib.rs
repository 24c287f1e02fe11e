//! Linearized dynamics of a two-port optomechanical cavity driven at the
//! red sideband: classical operating points, frequency-domain probe
//! response, perfect-absorption (inverse-transparency) conditions, and an
//! independent time-domain integrator used to validate the frequency-domain
//! results.
//!
//! The crate is organized around the flow
//!
//! 1. [`model`] — parameter containers and lab-quantity conversions,
//! 2. [`steady_state`] — the self-consistent pump operating point,
//! 3. [`response`] — probe response, output fields, absorption conditions,
//! 4. [`timedomain`] — RK4 integration of the mean-value equations,
//! 5. [`sweep`] — data-parallel detuning sweeps of the observables.

pub mod error;
pub mod model;
pub mod response;
pub mod steady_state;
pub mod sweep;
pub mod timedomain;

pub use error::{Error, Result};
pub use model::{MirrorGeometry, ProbeDrive, Pump, SystemParams};
pub use response::{IeitPoint, ProbeResponse};
pub use steady_state::SteadyState;
pub use sweep::SweepRow;
pub use timedomain::{HarmonicFit, QSwitchResult, Trajectory};
