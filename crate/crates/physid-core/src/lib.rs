//! Recovery of governing-equation families and their physical parameters
//! from observed state trajectories.
//!
//! The crate is organized around a fixed bank of candidate ODE families
//! ([`ode`]), discrete-time steppers including a deliberately preserved
//! buggy Euler variant ([`integrate`]), a synthetic clip generator with
//! known ground truth ([`synth`]), per-clip parameter estimation with
//! analytic gradients ([`fit`]), the trajectory-fitting procedures used to
//! derive ground truth ([`gtfit`]), latent-to-SI calibration
//! ([`calibrate`]), the evaluation axes ([`metrics`]), and the file formats
//! tying everything together ([`io`]).

pub mod calibrate;
pub mod error;
pub mod fit;
pub mod gtfit;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod ode;
pub mod synth;
pub mod trajectory;

pub use error::{Error, Result};
pub use integrate::{IntegratorKind, Rollout};
pub use ode::{FamilyTag, OdeFamily, ParamVector, StateVector};
pub use trajectory::{Trajectory, VelocityScheme};
