//! Observed trajectories: uniformly sampled positions per body.
//!
//! Only positions are observed (tracking a video yields positions);
//! velocities are reconstructed by finite differences where needed.

use crate::error::{Error, Result};
use crate::integrate::Rollout;
use crate::ode::StateVector;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample spacing in seconds.
    pub dt: f64,
    /// Time of the first sample.
    pub t0: f64,
    /// `positions[sample][body]`.
    pub positions: Vec<Vec<f64>>,
    /// Unit label for positions ("m", "rad", ...), when known.
    pub units: Option<String>,
}

impl Trajectory {
    pub fn new(dt: f64, t0: f64, positions: Vec<Vec<f64>>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("timestep must be positive, got {dt}")));
        }
        if positions.is_empty() {
            return Err(Error::TooShort { needed: 1, got: 0 });
        }
        let bodies = positions[0].len();
        if bodies == 0 || positions.iter().any(|row| row.len() != bodies) {
            return Err(Error::Domain("ragged or empty body rows".into()));
        }
        Ok(Self {
            dt,
            t0,
            positions,
            units: None,
        })
    }

    pub fn with_units(mut self, units: &str) -> Self {
        self.units = Some(units.to_string());
        self
    }

    /// Keep the position components of a rollout.
    pub fn from_rollout(r: &Rollout) -> Self {
        Self {
            dt: r.dt,
            t0: r.t0,
            positions: r.states.iter().map(|s| s.positions.clone()).collect(),
            units: None,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn body_count(&self) -> usize {
        self.positions[0].len()
    }

    pub fn time(&self, idx: usize) -> f64 {
        self.t0 + idx as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        (self.len().saturating_sub(1)) as f64 * self.dt
    }

    /// Position series of one body.
    pub fn body_series(&self, body: usize) -> Vec<f64> {
        self.positions.iter().map(|row| row[body]).collect()
    }

    /// Backward-difference velocity (z_t − z_{t−1}) / Δt, defined for t ≥ 1.
    ///
    /// This is the reconstruction matched to the semi-implicit Euler family:
    /// a trajectory rolled out with the corrected step satisfies
    /// z_t − z_{t−1} = Δt·ż_t exactly, so the internal velocity is recovered
    /// without truncation error.
    pub fn velocity_backward(&self, t: usize, body: usize) -> f64 {
        debug_assert!(t >= 1);
        (self.positions[t][body] - self.positions[t - 1][body]) / self.dt
    }

    /// Central-difference velocity (z_{t+1} − z_{t−1}) / (2Δt),
    /// defined for 1 ≤ t ≤ len−2. Second-order accurate.
    pub fn velocity_central(&self, t: usize, body: usize) -> f64 {
        debug_assert!(t >= 1 && t + 1 < self.len());
        (self.positions[t + 1][body] - self.positions[t - 1][body]) / (2.0 * self.dt)
    }

    /// Central second difference (z_{t+1} − 2z_t + z_{t−1}) / Δt².
    pub fn accel_central(&self, t: usize, body: usize) -> f64 {
        debug_assert!(t >= 1 && t + 1 < self.len());
        (self.positions[t + 1][body] - 2.0 * self.positions[t][body]
            + self.positions[t - 1][body])
            / (self.dt * self.dt)
    }

    /// Observed state at sample `t`. Second-order families get velocities by
    /// the requested finite-difference scheme.
    pub fn state_at(&self, t: usize, scheme: VelocityScheme, second_order: bool) -> StateVector {
        if !second_order {
            return StateVector::first_order(self.positions[t].clone());
        }
        let bodies = self.body_count();
        let velocities = (0..bodies)
            .map(|b| match scheme {
                VelocityScheme::Backward => self.velocity_backward(t, b),
                VelocityScheme::Central => self.velocity_central(t, b),
            })
            .collect();
        StateVector::second_order(self.positions[t].clone(), velocities)
    }
}

/// Finite-difference scheme for reconstructing velocities from positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityScheme {
    Backward,
    Central,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_differences_on_a_parabola() {
        // z(t) = t² sampled at Δt = 0.5: central velocity and acceleration
        // are exact for quadratics.
        let dt = 0.5;
        let positions: Vec<Vec<f64>> = (0..9)
            .map(|i| vec![(i as f64 * dt) * (i as f64 * dt)])
            .collect();
        let traj = Trajectory::new(dt, 0.0, positions).unwrap();
        assert!((traj.velocity_central(3, 0) - 2.0 * traj.time(3)).abs() < 1e-12);
        assert!((traj.accel_central(4, 0) - 2.0).abs() < 1e-12);
        // Backward difference lags by Δt/2 · z̈.
        let expect = 2.0 * traj.time(3) - dt;
        assert!((traj.velocity_backward(3, 0) - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Trajectory::new(0.0, 0.0, vec![vec![1.0]]).is_err());
        assert!(Trajectory::new(0.1, 0.0, vec![]).is_err());
        assert!(Trajectory::new(0.1, 0.0, vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
