//! Discrete-time steppers over the ODE bank.
//!
//! Four steppers are provided:
//!
//! * `euler-buggy` — the original uncorrected Euler step. Its position
//!   update omits the acceleration term, so one step's position output is
//!   independent of the physics parameters. Kept bit-faithful because the
//!   whole point is reproducing that failure mode.
//! * `euler` — the corrected step `z' = z + Δt·ż + Δt²·z̈`, algebraically
//!   identical to semi-implicit Euler (position updated with the already
//!   kicked velocity). Note the Δt² coefficient, not the textbook ½Δt².
//! * `verlet` — Störmer-Verlet: half kick, drift, half kick. The second
//!   acceleration evaluation uses the half-kicked velocity, which keeps the
//!   scheme explicit for velocity-dependent damping.
//! * `rk4` — the classical four-stage Runge-Kutta step.
//!
//! First-order families step by forward Euler under every kind except
//! `rk4`; `euler-buggy` is rejected for them since the bug concerns the
//! position update of a second-order system.
//!
//! Accelerations in the Euler variants are evaluated at the pre-step state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ode::{rhs, rhs_jacobians, OdeFamily, ParamVector, StateVector};

/// Rollouts abort once any state component exceeds this magnitude; the
/// harness records divergence rather than crashing on the inf/NaN that
/// follows.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorKind {
    EulerUncorrected,
    EulerCorrected,
    StormerVerlet,
    Rk4,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 4] = [
        IntegratorKind::EulerUncorrected,
        IntegratorKind::EulerCorrected,
        IntegratorKind::StormerVerlet,
        IntegratorKind::Rk4,
    ];

    /// Command-line spelling.
    pub fn as_cli_str(&self) -> &'static str {
        match self {
            IntegratorKind::EulerUncorrected => "euler-buggy",
            IntegratorKind::EulerCorrected => "euler",
            IntegratorKind::StormerVerlet => "verlet",
            IntegratorKind::Rk4 => "rk4",
        }
    }
}

impl std::fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_cli_str())
    }
}

impl std::str::FromStr for IntegratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntegratorKind::ALL
            .into_iter()
            .find(|k| k.as_cli_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown integrator `{s}`")))
    }
}

/// A uniformly spaced trajectory of full states produced by [`rollout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub states: Vec<StateVector>,
    pub dt: f64,
    pub t0: f64,
}

impl Rollout {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Position of `body` at sample `idx`.
    pub fn position(&self, idx: usize, body: usize) -> f64 {
        self.states[idx].positions[body]
    }
}

/// Acceleration block of the right-hand side for a second-order family.
fn accel(family: &OdeFamily, params: &ParamVector, state: &StateVector) -> Result<Vec<f64>> {
    Ok(rhs(family, params, state)?.velocities)
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("timestep must be positive, got {dt}")));
    }
    Ok(())
}

/// Advance one timestep.
pub fn step(
    kind: IntegratorKind,
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    check_dt(dt)?;
    if !family.tag.is_second_order() {
        return first_order_step(kind, family, params, state, dt);
    }
    let n = family.body_count;
    let z = &state.positions;
    let v = &state.velocities;
    match kind {
        IntegratorKind::EulerUncorrected => {
            let a = accel(family, params, state)?;
            let mut out = state.clone();
            for i in 0..n {
                out.velocities[i] = v[i] + dt * a[i];
                out.positions[i] = z[i] + dt * v[i];
            }
            Ok(out)
        }
        IntegratorKind::EulerCorrected => {
            let a = accel(family, params, state)?;
            let mut out = state.clone();
            for i in 0..n {
                out.velocities[i] = v[i] + dt * a[i];
                out.positions[i] = z[i] + dt * v[i] + dt * dt * a[i];
            }
            Ok(out)
        }
        IntegratorKind::StormerVerlet => {
            let h2 = 0.5 * dt;
            let a0 = accel(family, params, state)?;
            let vh: Vec<f64> = (0..n).map(|i| v[i] + h2 * a0[i]).collect();
            let z1: Vec<f64> = (0..n).map(|i| z[i] + dt * vh[i]).collect();
            let mid = StateVector::second_order(z1.clone(), vh.clone());
            let a1 = accel(family, params, &mid)?;
            let v1: Vec<f64> = (0..n).map(|i| vh[i] + h2 * a1[i]).collect();
            Ok(StateVector::second_order(z1, v1))
        }
        IntegratorKind::Rk4 => rk4_flat(family, params, state, dt),
    }
}

fn first_order_step(
    kind: IntegratorKind,
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    match kind {
        IntegratorKind::EulerUncorrected => Err(Error::BuggyEulerOnFirstOrder),
        IntegratorKind::Rk4 => rk4_flat(family, params, state, dt),
        _ => {
            let d = rhs(family, params, state)?;
            let positions = state
                .positions
                .iter()
                .zip(&d.positions)
                .map(|(z, f)| z + dt * f)
                .collect();
            Ok(StateVector::first_order(positions))
        }
    }
}

fn rk4_flat(
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    let second = family.tag.is_second_order();
    let s0 = state.to_flat();
    let eval = |flat: &[f64]| -> Result<Vec<f64>> {
        let s = StateVector::from_flat(flat, second);
        Ok(rhs(family, params, &s)?.to_flat())
    };
    let k1 = eval(&s0)?;
    let k2 = eval(&axpy(&s0, 0.5 * dt, &k1))?;
    let k3 = eval(&axpy(&s0, 0.5 * dt, &k2))?;
    let k4 = eval(&axpy(&s0, dt, &k3))?;
    let out: Vec<f64> = (0..s0.len())
        .map(|i| s0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    Ok(StateVector::from_flat(&out, second))
}

fn axpy(s: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    s.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// One step together with its Jacobians: ∂s′/∂s (flat state order) and
/// ∂s′/∂γ. These drive the analytic loss gradients.
#[derive(Debug, Clone)]
pub struct StepJacobians {
    pub next: StateVector,
    pub d_state: Mat,
    pub d_params: Mat,
}

pub fn step_with_jacobians(
    kind: IntegratorKind,
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StepJacobians> {
    check_dt(dt)?;
    if !family.tag.is_second_order() {
        return match kind {
            IntegratorKind::EulerUncorrected => Err(Error::BuggyEulerOnFirstOrder),
            IntegratorKind::Rk4 => rk4_with_jacobians(family, params, state, dt),
            _ => {
                // Forward Euler: s' = s + Δt f(s).
                let (js, jp) = rhs_jacobians(family, params, state)?;
                let next = first_order_step(kind, family, params, state, dt)?;
                let d = family.state_dim();
                let mut d_state = Mat::identity(d);
                d_state.add_scaled(&js, dt);
                let mut d_params = Mat::zeros(d, family.arity());
                d_params.add_scaled(&jp, dt);
                Ok(StepJacobians {
                    next,
                    d_state,
                    d_params,
                })
            }
        };
    }
    match kind {
        IntegratorKind::EulerUncorrected | IntegratorKind::EulerCorrected => {
            euler_with_jacobians(kind, family, params, state, dt)
        }
        IntegratorKind::StormerVerlet => verlet_with_jacobians(family, params, state, dt),
        IntegratorKind::Rk4 => rk4_with_jacobians(family, params, state, dt),
    }
}

/// Acceleration and its blocks: ∂a/∂z, ∂a/∂v, ∂a/∂γ.
fn accel_blocks(
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
) -> Result<(Vec<f64>, Mat, Mat, Mat)> {
    let n = family.body_count;
    let p = family.arity();
    let a = accel(family, params, state)?;
    let (js, jp) = rhs_jacobians(family, params, state)?;
    let mut az = Mat::zeros(n, n);
    let mut av = Mat::zeros(n, n);
    let mut ap = Mat::zeros(n, p);
    for i in 0..n {
        for j in 0..n {
            az[(i, j)] = js[(n + i, j)];
            av[(i, j)] = js[(n + i, n + j)];
        }
        for j in 0..p {
            ap[(i, j)] = jp[(n + i, j)];
        }
    }
    Ok((a, az, av, ap))
}

fn assemble(
    n: usize,
    p: usize,
    zz: &Mat,
    zv: &Mat,
    vz: &Mat,
    vv: &Mat,
    zp: &Mat,
    vp: &Mat,
) -> (Mat, Mat) {
    let mut d_state = Mat::zeros(2 * n, 2 * n);
    let mut d_params = Mat::zeros(2 * n, p);
    for i in 0..n {
        for j in 0..n {
            d_state[(i, j)] = zz[(i, j)];
            d_state[(i, n + j)] = zv[(i, j)];
            d_state[(n + i, j)] = vz[(i, j)];
            d_state[(n + i, n + j)] = vv[(i, j)];
        }
        for j in 0..p {
            d_params[(i, j)] = zp[(i, j)];
            d_params[(n + i, j)] = vp[(i, j)];
        }
    }
    (d_state, d_params)
}

fn euler_with_jacobians(
    kind: IntegratorKind,
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StepJacobians> {
    let n = family.body_count;
    let p = family.arity();
    let (a, az, av, ap) = accel_blocks(family, params, state)?;
    let next = step(kind, family, params, state, dt)?;
    let _ = a;

    // v' = v + Δt a  for both variants.
    let mut vz = az.clone();
    vz.scale(dt);
    let mut vv = Mat::identity(n);
    vv.add_scaled(&av, dt);
    let mut vp = ap.clone();
    vp.scale(dt);

    let (zz, zv, zp) = match kind {
        // z' = z + Δt v: the γ-dependent term is exactly what the bug drops.
        IntegratorKind::EulerUncorrected => {
            let zz = Mat::identity(n);
            let mut zv = Mat::identity(n);
            zv.scale(dt);
            (zz, zv, Mat::zeros(n, p))
        }
        // z' = z + Δt v + Δt² a
        IntegratorKind::EulerCorrected => {
            let dt2 = dt * dt;
            let mut zz = Mat::identity(n);
            zz.add_scaled(&az, dt2);
            let mut zv = Mat::identity(n);
            zv.scale(dt);
            zv.add_scaled(&av, dt2);
            let mut zp = ap;
            zp.scale(dt2);
            (zz, zv, zp)
        }
        _ => unreachable!(),
    };
    let (d_state, d_params) = assemble(n, p, &zz, &zv, &vz, &vv, &zp, &vp);
    Ok(StepJacobians {
        next,
        d_state,
        d_params,
    })
}

fn verlet_with_jacobians(
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StepJacobians> {
    let n = family.body_count;
    let p = family.arity();
    let h2 = 0.5 * dt;
    let z = &state.positions;
    let v = &state.velocities;

    let (a0, az0, av0, ap0) = accel_blocks(family, params, state)?;

    // vh = v + h2 a0
    let mut vh_z = az0.clone();
    vh_z.scale(h2);
    let mut vh_v = Mat::identity(n);
    vh_v.add_scaled(&av0, h2);
    let mut vh_p = ap0.clone();
    vh_p.scale(h2);
    let vh: Vec<f64> = (0..n).map(|i| v[i] + h2 * a0[i]).collect();

    // z1 = z + Δt vh
    let mut z1_z = Mat::identity(n);
    z1_z.add_scaled(&vh_z, dt);
    let mut z1_v = vh_v.clone();
    z1_v.scale(dt);
    let mut z1_p = vh_p.clone();
    z1_p.scale(dt);
    let z1: Vec<f64> = (0..n).map(|i| z[i] + dt * vh[i]).collect();

    // a1 at (z1, vh)
    let mid = StateVector::second_order(z1.clone(), vh.clone());
    let (a1, az1, av1, ap1) = accel_blocks(family, params, &mid)?;
    let a1_z = {
        let mut m = az1.matmul(&z1_z);
        m.add_scaled(&av1.matmul(&vh_z), 1.0);
        m
    };
    let a1_v = {
        let mut m = az1.matmul(&z1_v);
        m.add_scaled(&av1.matmul(&vh_v), 1.0);
        m
    };
    let a1_p = {
        let mut m = ap1.clone();
        m.add_scaled(&az1.matmul(&z1_p), 1.0);
        m.add_scaled(&av1.matmul(&vh_p), 1.0);
        m
    };

    // v1 = vh + h2 a1
    let mut v1_z = vh_z;
    v1_z.add_scaled(&a1_z, h2);
    let mut v1_v = vh_v;
    v1_v.add_scaled(&a1_v, h2);
    let mut v1_p = vh_p;
    v1_p.add_scaled(&a1_p, h2);
    let v1: Vec<f64> = (0..n).map(|i| vh[i] + h2 * a1[i]).collect();

    let (d_state, d_params) = assemble(n, p, &z1_z, &z1_v, &v1_z, &v1_v, &z1_p, &v1_p);
    Ok(StepJacobians {
        next: StateVector::second_order(z1, v1),
        d_state,
        d_params,
    })
}

fn rk4_with_jacobians(
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
    dt: f64,
) -> Result<StepJacobians> {
    let second = family.tag.is_second_order();
    let d = family.state_dim();
    let p = family.arity();
    let s0 = state.to_flat();

    // Evaluate f with the chain rule applied to an intermediate point
    // u = s0 + h·k whose sensitivities are (U_s, U_p).
    let eval = |flat: &[f64], u_s: &Mat, u_p: &Mat| -> Result<(Vec<f64>, Mat, Mat)> {
        let s = StateVector::from_flat(flat, second);
        let f = rhs(family, params, &s)?.to_flat();
        let (js, jp) = rhs_jacobians(family, params, &s)?;
        let k_s = js.matmul(u_s);
        let mut k_p = jp;
        k_p.add_scaled(&js.matmul(u_p), 1.0);
        Ok((f, k_s, k_p))
    };

    let ident = Mat::identity(d);
    let zero_p = Mat::zeros(d, p);

    let (k1, k1_s, k1_p) = eval(&s0, &ident, &zero_p)?;

    let stage = |h: f64, k: &[f64], k_s: &Mat, k_p: &Mat| -> (Vec<f64>, Mat, Mat) {
        let u = axpy(&s0, h, k);
        let mut u_s = Mat::identity(d);
        u_s.add_scaled(k_s, h);
        let mut u_p = Mat::zeros(d, p);
        u_p.add_scaled(k_p, h);
        (u, u_s, u_p)
    };

    let (u2, u2_s, u2_p) = stage(0.5 * dt, &k1, &k1_s, &k1_p);
    let (k2, k2_s, k2_p) = eval(&u2, &u2_s, &u2_p)?;
    let (u3, u3_s, u3_p) = stage(0.5 * dt, &k2, &k2_s, &k2_p);
    let (k3, k3_s, k3_p) = eval(&u3, &u3_s, &u3_p)?;
    let (u4, u4_s, u4_p) = stage(dt, &k3, &k3_s, &k3_p);
    let (k4, k4_s, k4_p) = eval(&u4, &u4_s, &u4_p)?;

    let w = dt / 6.0;
    let out: Vec<f64> = (0..d)
        .map(|i| s0[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let mut d_state = Mat::identity(d);
    d_state.add_scaled(&k1_s, w);
    d_state.add_scaled(&k2_s, 2.0 * w);
    d_state.add_scaled(&k3_s, 2.0 * w);
    d_state.add_scaled(&k4_s, w);
    let mut d_params = Mat::zeros(d, p);
    d_params.add_scaled(&k1_p, w);
    d_params.add_scaled(&k2_p, 2.0 * w);
    d_params.add_scaled(&k3_p, 2.0 * w);
    d_params.add_scaled(&k4_p, w);

    Ok(StepJacobians {
        next: StateVector::from_flat(&out, second),
        d_state,
        d_params,
    })
}

/// Iterate [`step`] for `steps` steps; returns `steps + 1` states including
/// the initial one. Aborts with [`Error::Diverged`] naming the step index
/// when any component goes non-finite or past [`DIVERGENCE_LIMIT`].
pub fn rollout(
    kind: IntegratorKind,
    family: &OdeFamily,
    params: &ParamVector,
    initial: &StateVector,
    dt: f64,
    steps: usize,
) -> Result<Rollout> {
    check_dt(dt)?;
    if steps == 0 {
        return Err(Error::Domain("rollout needs at least one step".into()));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    let mut current = initial.clone();
    for idx in 0..steps {
        current = step(kind, family, params, &current, dt)?;
        if !current.is_finite() || current.max_abs() > DIVERGENCE_LIMIT {
            return Err(Error::Diverged { step: idx + 1 });
        }
        states.push(current.clone());
    }
    Ok(Rollout {
        states,
        dt,
        t0: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::FamilyTag;

    fn oscillator(alpha: f64, beta: f64) -> (OdeFamily, ParamVector) {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = ParamVector::new(fam.clone(), vec![alpha, beta]).unwrap();
        (fam, p)
    }

    #[test]
    fn corrected_step_matches_hand_evaluation() {
        // z̈ = −1, ż' = −0.1, z' = 1 + 0 + 0.01·(−1) = 0.99
        let (fam, p) = oscillator(1.0, 0.0);
        let s = StateVector::second_order(vec![1.0], vec![0.0]);
        let out = step(IntegratorKind::EulerCorrected, &fam, &p, &s, 0.1).unwrap();
        assert!((out.velocities[0] + 0.1).abs() < 1e-15);
        assert!((out.positions[0] - 0.99).abs() < 1e-15);
    }

    #[test]
    fn buggy_step_position_ignores_params() {
        let (fam, p) = oscillator(1.0, 0.0);
        let s = StateVector::second_order(vec![1.0], vec![0.0]);
        let out = step(IntegratorKind::EulerUncorrected, &fam, &p, &s, 0.1).unwrap();
        assert_eq!(out.positions[0], 1.0);
        assert!((out.velocities[0] + 0.1).abs() < 1e-15);
        // Same position for wildly different parameters.
        let (_, p2) = oscillator(999.0, 5.0);
        let out2 = step(IntegratorKind::EulerUncorrected, &fam, &p2, &s, 0.1).unwrap();
        assert_eq!(out2.positions[0], out.positions[0]);
    }

    #[test]
    fn zero_dynamics_is_fixed_point() {
        let (fam, p) = oscillator(0.0, 0.0);
        let s = StateVector::second_order(vec![0.4], vec![0.0]);
        for kind in IntegratorKind::ALL {
            let out = step(kind, &fam, &p, &s, 0.05).unwrap();
            assert_eq!(out.positions[0], 0.4);
            assert_eq!(out.velocities[0], 0.0);
        }
    }

    #[test]
    fn corrected_equals_semi_implicit_bitwise() {
        let (fam, p) = oscillator(3.7, 0.41);
        let mut s = StateVector::second_order(vec![0.83], vec![-0.2]);
        let dt = 1.0 / 60.0;
        for _ in 0..200 {
            let next = step(IntegratorKind::EulerCorrected, &fam, &p, &s, dt).unwrap();
            // Semi-implicit: kick velocity first, then drift with it. The
            // two forms are algebraically identical; summation order differs
            // by at most a couple of ulps.
            let a = rhs(&fam, &p, &s).unwrap().velocities[0];
            let v1 = s.velocities[0] + dt * a;
            let z1 = s.positions[0] + dt * v1;
            assert_eq!(next.velocities[0], v1);
            let scale = z1.abs().max(1.0);
            assert!((next.positions[0] - z1).abs() <= 4.0 * f64::EPSILON * scale);
            s = next;
        }
    }

    #[test]
    fn buggy_euler_rejected_on_first_order() {
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let p = ParamVector::new(fam.clone(), vec![1.0]).unwrap();
        let s = StateVector::first_order(vec![1.0]);
        assert!(matches!(
            step(IntegratorKind::EulerUncorrected, &fam, &p, &s, 0.1),
            Err(Error::BuggyEulerOnFirstOrder)
        ));
    }

    #[test]
    fn torricelli_empty_tank_stays_empty() {
        let fam = OdeFamily::single(FamilyTag::Torricelli);
        let p = ParamVector::new(fam.clone(), vec![0.016]).unwrap();
        let s = StateVector::first_order(vec![0.0]);
        let r = rollout(IntegratorKind::EulerCorrected, &fam, &p, &s, 0.1, 50).unwrap();
        assert_eq!(r.len(), 51);
        assert!(r.states.iter().all(|st| st.positions[0] == 0.0));
    }

    #[test]
    fn rk4_closes_one_period() {
        let (fam, p) = oscillator(1.0, 0.0);
        let s = StateVector::second_order(vec![1.0], vec![0.0]);
        let r = rollout(IntegratorKind::Rk4, &fam, &p, &s, 0.01, 628).unwrap();
        let end = r.states.last().unwrap();
        let expect = crate::ode::closed_form(&fam, &p, &s, 6.28).unwrap();
        assert!((end.positions[0] - expect.positions[0]).abs() < 1e-4);
    }

    #[test]
    fn divergence_guard_names_step() {
        // Explicit Euler on a stiff oscillator blows up; the guard should
        // report the failing index instead of propagating non-finite state.
        let (fam, p) = oscillator(1e9, 0.0);
        let s = StateVector::second_order(vec![1.0], vec![0.0]);
        let err = rollout(IntegratorKind::EulerUncorrected, &fam, &p, &s, 0.5, 10_000).unwrap_err();
        match err {
            Error::Diverged { step } => assert!(step >= 1),
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn step_variants_agree_with_jacobian_path() {
        let fam = OdeFamily::coupled_pendulum(2);
        let p = ParamVector::new(fam.clone(), vec![19.62, 12.0, 0.02, 0.05, 3.0]).unwrap();
        let s = StateVector::second_order(vec![0.4, -0.2], vec![0.3, 0.1]);
        for kind in IntegratorKind::ALL {
            let plain = step(kind, &fam, &p, &s, 0.02).unwrap();
            let jac = step_with_jacobians(kind, &fam, &p, &s, 0.02).unwrap();
            assert_eq!(plain, jac.next);
        }
    }

    #[test]
    fn first_order_forward_euler_under_non_rk4_kinds() {
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let p = ParamVector::new(fam.clone(), vec![2.0]).unwrap();
        let s = StateVector::first_order(vec![1.0]);
        let e = step(IntegratorKind::EulerCorrected, &fam, &p, &s, 0.1).unwrap();
        let v = step(IntegratorKind::StormerVerlet, &fam, &p, &s, 0.1).unwrap();
        assert_eq!(e.positions[0], 0.8);
        assert_eq!(v.positions[0], 0.8);
        let r = step(IntegratorKind::Rk4, &fam, &p, &s, 0.1).unwrap();
        assert!((r.positions[0] - (-0.2f64).exp()).abs() < 1e-5);
    }
}
