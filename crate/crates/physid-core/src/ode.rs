//! The candidate bank of governing-equation families.
//!
//! Seven dynamical families plus the algebraic apparent-radius model used
//! for overhead free-fall footage. Each family exposes its right-hand side,
//! analytic Jacobians with respect to state and parameters, and a closed-form
//! solution where one exists.
//!
//! Canonical parameter order per family (all serialization uses this order):
//!
//! | family               | parameters                                          |
//! |----------------------|-----------------------------------------------------|
//! | `second_order_linear`| α, β           (z̈ = −β ż − α z)                     |
//! | `first_order_decay`  | λ              (ż = −λ z, λ ≥ 0)                    |
//! | `torricelli`         | k              (ż = −k √max(z, 0), k ≥ 0)           |
//! | `constant_accel`     | a              (ẍ = a)                              |
//! | `nonlinear_pendulum` | g/L, ζ         (θ̈ = −ζ θ̇ − (g/L) sin θ)            |
//! | `coupled_pendulum`   | g/L₁..g/L_N, ζ₁..ζ_N, κ₀₁, κ₀₂, .., κ_{N−2,N−1}     |
//! | `coupled_contact`    | κ, ζ           (z̈ᵢ = −ζ żᵢ − κ Σⱼ(zᵢ − zⱼ))         |
//! | `falling_ball_radius`| g, r₀f, h₀     (r(t) = r₀f / (h₀ + ½ g t²))         |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Tag identifying one governing-equation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    SecondOrderLinear,
    FirstOrderDecay,
    Torricelli,
    ConstantAccel,
    NonlinearPendulum,
    CoupledPendulum,
    CoupledContact,
    FallingBallRadius,
}

impl FamilyTag {
    /// All tags in canonical order. The order doubles as the deterministic
    /// tie-break in family selection, so Torricelli deliberately precedes
    /// ConstantAccel: a draining tank traces an exact parabola, and the
    /// earlier candidate must win the resulting residual tie.
    pub const ALL: [FamilyTag; 8] = [
        FamilyTag::SecondOrderLinear,
        FamilyTag::FirstOrderDecay,
        FamilyTag::Torricelli,
        FamilyTag::ConstantAccel,
        FamilyTag::NonlinearPendulum,
        FamilyTag::CoupledPendulum,
        FamilyTag::CoupledContact,
        FamilyTag::FallingBallRadius,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyTag::SecondOrderLinear => "second_order_linear",
            FamilyTag::FirstOrderDecay => "first_order_decay",
            FamilyTag::Torricelli => "torricelli",
            FamilyTag::ConstantAccel => "constant_accel",
            FamilyTag::NonlinearPendulum => "nonlinear_pendulum",
            FamilyTag::CoupledPendulum => "coupled_pendulum",
            FamilyTag::CoupledContact => "coupled_contact",
            FamilyTag::FallingBallRadius => "falling_ball_radius",
        }
    }

    /// True for families whose state carries a velocity component.
    pub fn is_second_order(&self) -> bool {
        matches!(
            self,
            FamilyTag::SecondOrderLinear
                | FamilyTag::ConstantAccel
                | FamilyTag::NonlinearPendulum
                | FamilyTag::CoupledPendulum
                | FamilyTag::CoupledContact
        )
    }

    /// True for families that define a differential right-hand side.
    /// The apparent-radius model is purely algebraic.
    pub fn has_rhs(&self) -> bool {
        !matches!(self, FamilyTag::FallingBallRadius)
    }

    pub fn is_coupled(&self) -> bool {
        matches!(self, FamilyTag::CoupledPendulum | FamilyTag::CoupledContact)
    }
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown family tag `{s}`")))
    }
}

/// A governing-equation family instantiated for a fixed number of bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeFamily {
    pub tag: FamilyTag,
    pub body_count: usize,
    /// Contact gate for coupled families: when set, the pairwise coupling
    /// acts only while |zᵢ − zⱼ| is below this threshold. `None` means the
    /// coupling is continuously active (the default modeling choice).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_window: Option<f64>,
}

impl OdeFamily {
    pub fn new(tag: FamilyTag, body_count: usize) -> Result<Self> {
        if tag.is_coupled() {
            if body_count < 2 {
                return Err(Error::BodyCountMismatch {
                    family: tag.to_string(),
                    expected: 2,
                    got: body_count,
                });
            }
        } else if body_count != 1 {
            return Err(Error::BodyCountMismatch {
                family: tag.to_string(),
                expected: 1,
                got: body_count,
            });
        }
        Ok(Self {
            tag,
            body_count,
            contact_window: None,
        })
    }

    /// Single-body family.
    pub fn single(tag: FamilyTag) -> Self {
        Self::new(tag, 1).expect("single-body tag")
    }

    pub fn coupled_pendulum(bodies: usize) -> Self {
        Self::new(FamilyTag::CoupledPendulum, bodies).expect("bodies >= 2")
    }

    pub fn coupled_contact(bodies: usize) -> Self {
        Self::new(FamilyTag::CoupledContact, bodies).expect("bodies >= 2")
    }

    pub fn with_contact_window(mut self, window: f64) -> Self {
        self.contact_window = Some(window);
        self
    }

    /// Number of parameters in the family's canonical order.
    pub fn arity(&self) -> usize {
        let n = self.body_count;
        match self.tag {
            FamilyTag::SecondOrderLinear | FamilyTag::NonlinearPendulum => 2,
            FamilyTag::FirstOrderDecay | FamilyTag::Torricelli | FamilyTag::ConstantAccel => 1,
            FamilyTag::CoupledPendulum => 2 * n + n * (n - 1) / 2,
            FamilyTag::CoupledContact => 2,
            FamilyTag::FallingBallRadius => 3,
        }
    }

    /// Flattened state dimension: N positions plus N velocities for
    /// second-order families, N positions otherwise.
    pub fn state_dim(&self) -> usize {
        if self.tag.is_second_order() {
            2 * self.body_count
        } else {
            self.body_count
        }
    }

    /// Canonical parameter names, used in serialized output.
    pub fn param_names(&self) -> Vec<String> {
        let n = self.body_count;
        match self.tag {
            FamilyTag::SecondOrderLinear => vec!["alpha".into(), "beta".into()],
            FamilyTag::FirstOrderDecay => vec!["lambda".into()],
            FamilyTag::Torricelli => vec!["k".into()],
            FamilyTag::ConstantAccel => vec!["a".into()],
            FamilyTag::NonlinearPendulum => vec!["g_over_l".into(), "zeta".into()],
            FamilyTag::CoupledPendulum => {
                let mut names = Vec::with_capacity(self.arity());
                for i in 0..n {
                    names.push(format!("g_over_l{}", i + 1));
                }
                for i in 0..n {
                    names.push(format!("zeta{}", i + 1));
                }
                for i in 0..n {
                    for j in i + 1..n {
                        names.push(format!("kappa{}{}", i + 1, j + 1));
                    }
                }
                names
            }
            FamilyTag::CoupledContact => vec!["kappa".into(), "zeta".into()],
            FamilyTag::FallingBallRadius => vec!["g".into(), "r0f".into(), "h0".into()],
        }
    }

    /// Time order of each parameter: 2 for stiffness-like coefficients
    /// (scale as Δt⁻²), 1 for rate-like (Δt⁻¹), 0 for time-free constants.
    pub fn param_time_orders(&self) -> Vec<u8> {
        let n = self.body_count;
        match self.tag {
            FamilyTag::SecondOrderLinear | FamilyTag::NonlinearPendulum => vec![2, 1],
            FamilyTag::FirstOrderDecay | FamilyTag::Torricelli => vec![1],
            FamilyTag::ConstantAccel => vec![2],
            FamilyTag::CoupledPendulum => {
                let mut orders = vec![2; n];
                orders.extend(vec![1; n]);
                orders.extend(vec![2; n * (n - 1) / 2]);
                orders
            }
            FamilyTag::CoupledContact => vec![2, 1],
            FamilyTag::FallingBallRadius => vec![2, 0, 0],
        }
    }

    /// Index of κᵢⱼ (i < j, zero-based bodies) within a coupled-pendulum
    /// parameter vector. The upper triangle is stored row-major after the
    /// 2N per-body entries; κⱼᵢ aliases κᵢⱼ.
    pub fn kappa_index(&self, i: usize, j: usize) -> usize {
        debug_assert_eq!(self.tag, FamilyTag::CoupledPendulum);
        let n = self.body_count;
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(j < n && i != j);
        2 * n + i * n - i * (i + 1) / 2 + (j - i - 1)
    }
}

/// Parameter vector γ in the family's canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub family: OdeFamily,
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn new(family: OdeFamily, values: Vec<f64>) -> Result<Self> {
        if values.len() != family.arity() {
            return Err(Error::ArityMismatch {
                family: family.tag.to_string(),
                expected: family.arity(),
                got: values.len(),
            });
        }
        let pv = Self { family, values };
        pv.check_constraints()?;
        Ok(pv)
    }

    fn check_constraints(&self) -> Result<()> {
        match self.family.tag {
            FamilyTag::Torricelli if self.values[0] < 0.0 => Err(Error::InvalidParams {
                family: self.family.tag.to_string(),
                detail: "drain coefficient k must be >= 0".into(),
            }),
            FamilyTag::FirstOrderDecay if self.values[0] < 0.0 => Err(Error::InvalidParams {
                family: self.family.tag.to_string(),
                detail: "decay rate lambda must be >= 0 (decay, not growth)".into(),
            }),
            _ => Ok(()),
        }
    }

    /// Clamp onto the feasible set (used after each optimizer step).
    pub fn project_feasible(&mut self) {
        if matches!(
            self.family.tag,
            FamilyTag::Torricelli | FamilyTag::FirstOrderDecay
        ) && self.values[0] < 0.0
        {
            self.values[0] = 0.0;
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-body positions and velocities. First-order families carry an empty
/// velocity list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl StateVector {
    pub fn second_order(positions: Vec<f64>, velocities: Vec<f64>) -> Self {
        assert_eq!(positions.len(), velocities.len());
        Self {
            positions,
            velocities,
        }
    }

    pub fn first_order(positions: Vec<f64>) -> Self {
        Self {
            positions,
            velocities: Vec::new(),
        }
    }

    pub fn body_count(&self) -> usize {
        self.positions.len()
    }

    /// Flatten to [positions.., velocities..].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.positions.clone();
        flat.extend_from_slice(&self.velocities);
        flat
    }

    pub fn from_flat(flat: &[f64], second_order: bool) -> Self {
        if second_order {
            let n = flat.len() / 2;
            Self {
                positions: flat[..n].to_vec(),
                velocities: flat[n..].to_vec(),
            }
        } else {
            Self::first_order(flat.to_vec())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().chain(&self.velocities).all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.positions
            .iter()
            .chain(&self.velocities)
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_shapes(family: &OdeFamily, params: &ParamVector, state: &StateVector) -> Result<()> {
    if params.values.len() != family.arity() {
        return Err(Error::ArityMismatch {
            family: family.tag.to_string(),
            expected: family.arity(),
            got: params.values.len(),
        });
    }
    if state.positions.len() != family.body_count {
        return Err(Error::BodyCountMismatch {
            family: family.tag.to_string(),
            expected: family.body_count,
            got: state.positions.len(),
        });
    }
    let want_vel = if family.tag.is_second_order() {
        family.body_count
    } else {
        0
    };
    if state.velocities.len() != want_vel {
        return Err(Error::BodyCountMismatch {
            family: family.tag.to_string(),
            expected: want_vel,
            got: state.velocities.len(),
        });
    }
    Ok(())
}

/// Pairwise coupling gate: 1.0 when active, 0.0 when suppressed.
fn gate(family: &OdeFamily, zi: f64, zj: f64) -> f64 {
    match family.contact_window {
        Some(w) if (zi - zj).abs() >= w => 0.0,
        _ => 1.0,
    }
}

/// Time derivative of the state under the family's governing equation.
///
/// Returns a [`StateVector`] holding (dz/dt, dv/dt) per body; for
/// first-order families `positions` holds ż and `velocities` stays empty.
pub fn rhs(family: &OdeFamily, params: &ParamVector, state: &StateVector) -> Result<StateVector> {
    check_shapes(family, params, state)?;
    let n = family.body_count;
    let g = &params.values;
    let z = &state.positions;
    let v = &state.velocities;
    match family.tag {
        FamilyTag::SecondOrderLinear => {
            let (alpha, beta) = (g[0], g[1]);
            Ok(StateVector::second_order(
                vec![v[0]],
                vec![-beta * v[0] - alpha * z[0]],
            ))
        }
        FamilyTag::NonlinearPendulum => {
            let (gl, zeta) = (g[0], g[1]);
            Ok(StateVector::second_order(
                vec![v[0]],
                vec![-zeta * v[0] - gl * z[0].sin()],
            ))
        }
        FamilyTag::ConstantAccel => Ok(StateVector::second_order(vec![v[0]], vec![g[0]])),
        FamilyTag::FirstOrderDecay => Ok(StateVector::first_order(vec![-g[0] * z[0]])),
        FamilyTag::Torricelli => {
            // Drain level cannot go negative; the clamp keeps rollouts
            // finite near the empty tank.
            Ok(StateVector::first_order(vec![-g[0] * z[0].max(0.0).sqrt()]))
        }
        FamilyTag::CoupledPendulum => {
            let mut accel = vec![0.0; n];
            for i in 0..n {
                let mut a = -g[n + i] * v[i] - g[i] * z[i].sin();
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let kappa = g[family.kappa_index(i, j)];
                    a -= gate(family, z[i], z[j]) * kappa * (z[i] - z[j]);
                }
                accel[i] = a;
            }
            Ok(StateVector::second_order(v.clone(), accel))
        }
        FamilyTag::CoupledContact => {
            let (kappa, zeta) = (g[0], g[1]);
            let mut accel = vec![0.0; n];
            for i in 0..n {
                let mut a = -zeta * v[i];
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    a -= gate(family, z[i], z[j]) * kappa * (z[i] - z[j]);
                }
                accel[i] = a;
            }
            Ok(StateVector::second_order(v.clone(), accel))
        }
        FamilyTag::FallingBallRadius => Err(Error::UnsupportedFamily {
            family: family.tag.to_string(),
            op: "rhs",
        }),
    }
}

/// Jacobians of [`rhs`] with respect to the flattened state and the
/// parameter vector. Row/column order follows [`StateVector::to_flat`].
pub fn rhs_jacobians(
    family: &OdeFamily,
    params: &ParamVector,
    state: &StateVector,
) -> Result<(Mat, Mat)> {
    check_shapes(family, params, state)?;
    let n = family.body_count;
    let d = family.state_dim();
    let p = family.arity();
    let g = &params.values;
    let z = &state.positions;
    let v = &state.velocities;
    let mut js = Mat::zeros(d, d);
    let mut jp = Mat::zeros(d, p);
    match family.tag {
        FamilyTag::SecondOrderLinear => {
            let (alpha, beta) = (g[0], g[1]);
            js[(0, 1)] = 1.0;
            js[(1, 0)] = -alpha;
            js[(1, 1)] = -beta;
            jp[(1, 0)] = -z[0];
            jp[(1, 1)] = -v[0];
        }
        FamilyTag::NonlinearPendulum => {
            let (gl, zeta) = (g[0], g[1]);
            js[(0, 1)] = 1.0;
            js[(1, 0)] = -gl * z[0].cos();
            js[(1, 1)] = -zeta;
            jp[(1, 0)] = -z[0].sin();
            jp[(1, 1)] = -v[0];
        }
        FamilyTag::ConstantAccel => {
            js[(0, 1)] = 1.0;
            jp[(1, 0)] = 1.0;
        }
        FamilyTag::FirstOrderDecay => {
            js[(0, 0)] = -g[0];
            jp[(0, 0)] = -z[0];
        }
        FamilyTag::Torricelli => {
            // Sub-gradient 0 at the clamp: below the empty level the flow
            // is identically zero.
            if z[0] > 0.0 {
                js[(0, 0)] = -g[0] / (2.0 * z[0].sqrt());
            }
            jp[(0, 0)] = -z[0].max(0.0).sqrt();
        }
        FamilyTag::CoupledPendulum => {
            for i in 0..n {
                js[(i, n + i)] = 1.0;
                let row = n + i;
                js[(row, i)] = -g[i] * z[i].cos();
                js[(row, n + i)] = -g[n + i];
                jp[(row, i)] = -z[i].sin();
                jp[(row, n + i)] = -v[i];
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let active = gate(family, z[i], z[j]);
                    let ki = family.kappa_index(i, j);
                    js[(row, i)] -= active * g[ki];
                    js[(row, j)] += active * g[ki];
                    jp[(row, ki)] = -active * (z[i] - z[j]);
                }
            }
        }
        FamilyTag::CoupledContact => {
            let (kappa, zeta) = (g[0], g[1]);
            for i in 0..n {
                js[(i, n + i)] = 1.0;
                let row = n + i;
                js[(row, n + i)] = -zeta;
                jp[(row, 1)] = -v[i];
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let active = gate(family, z[i], z[j]);
                    js[(row, i)] -= active * kappa;
                    js[(row, j)] += active * kappa;
                    jp[(row, 0)] -= active * (z[i] - z[j]);
                }
            }
        }
        FamilyTag::FallingBallRadius => {
            return Err(Error::UnsupportedFamily {
                family: family.tag.to_string(),
                op: "rhs_jacobians",
            })
        }
    }
    Ok((js, jp))
}

/// Exact solution at time `t` for the families that admit one.
///
/// Supported: first-order decay, constant acceleration, the undamped
/// second-order linear oscillator (β = 0), and the apparent-radius model
/// (which ignores `initial`: its trajectory is fixed by the parameters).
pub fn closed_form(
    family: &OdeFamily,
    params: &ParamVector,
    initial: &StateVector,
    t: f64,
) -> Result<StateVector> {
    check_shapes(family, params, initial)?;
    let g = &params.values;
    match family.tag {
        FamilyTag::FirstOrderDecay => Ok(StateVector::first_order(vec![
            initial.positions[0] * (-g[0] * t).exp(),
        ])),
        FamilyTag::ConstantAccel => {
            let (x0, v0, a) = (initial.positions[0], initial.velocities[0], g[0]);
            Ok(StateVector::second_order(
                vec![x0 + v0 * t + 0.5 * a * t * t],
                vec![v0 + a * t],
            ))
        }
        FamilyTag::SecondOrderLinear => {
            let (alpha, beta) = (g[0], g[1]);
            if beta != 0.0 {
                return Err(Error::UnsupportedFamily {
                    family: "second_order_linear with damping".into(),
                    op: "closed_form",
                });
            }
            if alpha <= 0.0 {
                return Err(Error::Domain(
                    "closed form of the oscillator requires alpha > 0".into(),
                ));
            }
            let w = alpha.sqrt();
            let (z0, v0) = (initial.positions[0], initial.velocities[0]);
            Ok(StateVector::second_order(
                vec![z0 * (w * t).cos() + v0 / w * (w * t).sin()],
                vec![-z0 * w * (w * t).sin() + v0 * (w * t).cos()],
            ))
        }
        FamilyTag::FallingBallRadius => {
            let (grav, r0f, h0) = (g[0], g[1], g[2]);
            Ok(StateVector::first_order(vec![
                r0f / (h0 + 0.5 * grav * t * t),
            ]))
        }
        _ => Err(Error::UnsupportedFamily {
            family: family.tag.to_string(),
            op: "closed_form",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(family: OdeFamily, values: &[f64]) -> ParamVector {
        ParamVector::new(family, values.to_vec()).unwrap()
    }

    #[test]
    fn unit_oscillator_accel() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = pv(fam.clone(), &[1.0, 0.0]);
        let s = StateVector::second_order(vec![1.0], vec![0.0]);
        let d = rhs(&fam, &p, &s).unwrap();
        assert_eq!(d.velocities[0], -1.0);
        assert_eq!(d.positions[0], 0.0);
    }

    #[test]
    fn pendulum_equilibrium() {
        let fam = OdeFamily::single(FamilyTag::NonlinearPendulum);
        let p = pv(fam.clone(), &[19.62, 0.02]);
        let s = StateVector::second_order(vec![0.0], vec![0.0]);
        let d = rhs(&fam, &p, &s).unwrap();
        assert_eq!(d.velocities[0], 0.0);
    }

    #[test]
    fn coupled_pendulum_decouples_at_zero_kappa() {
        let fam = OdeFamily::coupled_pendulum(2);
        let p = pv(fam.clone(), &[19.62, 12.0, 0.02, 0.05, 0.0]);
        let s = StateVector::second_order(vec![0.7, -0.3], vec![0.1, 0.4]);
        let d = rhs(&fam, &p, &s).unwrap();
        let single = OdeFamily::single(FamilyTag::NonlinearPendulum);
        for body in 0..2 {
            let ps = pv(
                single.clone(),
                &[p.values[body], p.values[2 + body]],
            );
            let ss = StateVector::second_order(
                vec![s.positions[body]],
                vec![s.velocities[body]],
            );
            let ds = rhs(&single, &ps, &ss).unwrap();
            assert_eq!(d.velocities[body], ds.velocities[0]);
        }
    }

    #[test]
    fn torricelli_paper_coefficient() {
        // Table 3 ground truth k = 0.016; at z = 1 the drain rate is −k.
        let fam = OdeFamily::single(FamilyTag::Torricelli);
        let p = pv(fam.clone(), &[0.016]);
        let s = StateVector::first_order(vec![1.0]);
        let d = rhs(&fam, &p, &s).unwrap();
        assert!((d.positions[0] + 0.016).abs() < 1e-15);
    }

    #[test]
    fn torricelli_clamps_negative_level() {
        let fam = OdeFamily::single(FamilyTag::Torricelli);
        let p = pv(fam.clone(), &[0.5]);
        let s = StateVector::first_order(vec![-0.3]);
        let d = rhs(&fam, &p, &s).unwrap();
        assert_eq!(d.positions[0], 0.0);
    }

    #[test]
    fn second_order_param_jacobian() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = pv(fam.clone(), &[1.3, 0.2]);
        let s = StateVector::second_order(vec![2.0], vec![0.5]);
        let (js, jp) = rhs_jacobians(&fam, &p, &s).unwrap();
        assert_eq!(jp[(1, 0)], -2.0); // ∂z̈/∂α = −z
        assert_eq!(jp[(1, 1)], -0.5); // ∂z̈/∂β = −ż
        assert_eq!(js[(1, 0)], -1.3); // ∂z̈/∂z = −α
        assert_eq!(js[(1, 1)], -0.2); // ∂z̈/∂ż = −β
    }

    #[test]
    fn pendulum_param_jacobian_at_quarter_turn() {
        let fam = OdeFamily::single(FamilyTag::NonlinearPendulum);
        let p = pv(fam.clone(), &[19.62, 0.02]);
        let s = StateVector::second_order(vec![std::f64::consts::FRAC_PI_2], vec![0.0]);
        let (_, jp) = rhs_jacobians(&fam, &p, &s).unwrap();
        assert!((jp[(1, 0)] + 1.0).abs() < 1e-15); // −sin(π/2)
    }

    #[test]
    fn decay_closed_form_paper_rate() {
        // LED ground-truth rate 2.30: e^{−2.30} by direct evaluation.
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let p = pv(fam.clone(), &[2.30]);
        let s = StateVector::first_order(vec![1.0]);
        let out = closed_form(&fam, &p, &s, 1.0).unwrap();
        assert!((out.positions[0] - (-2.30f64).exp()).abs() < 1e-15);
        assert!((out.positions[0] - 0.1003).abs() < 1e-4);
    }

    #[test]
    fn constant_accel_rest_is_fixed_point() {
        let fam = OdeFamily::single(FamilyTag::ConstantAccel);
        let p = pv(fam.clone(), &[0.0]);
        let s = StateVector::second_order(vec![3.5], vec![0.0]);
        for t in [0.0, 0.7, 4.2] {
            let out = closed_form(&fam, &p, &s, t).unwrap();
            assert_eq!(out.positions[0], 3.5);
        }
    }

    #[test]
    fn falling_ball_radius_identity_at_t0() {
        let fam = OdeFamily::single(FamilyTag::FallingBallRadius);
        let p = pv(fam.clone(), &[9.81, 1.0, 1.0]);
        let s = StateVector::first_order(vec![1.0]);
        let out = closed_form(&fam, &p, &s, 0.0).unwrap();
        assert_eq!(out.positions[0], 1.0);
    }

    #[test]
    fn arity_is_enforced() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        assert!(ParamVector::new(fam, vec![1.0]).is_err());
    }

    #[test]
    fn sign_constraints_rejected() {
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        assert!(ParamVector::new(fam.clone(), vec![-0.1]).is_err());
        let fam = OdeFamily::single(FamilyTag::Torricelli);
        assert!(ParamVector::new(fam, vec![-0.1]).is_err());
    }

    #[test]
    fn kappa_index_upper_triangle() {
        let fam = OdeFamily::coupled_pendulum(3);
        assert_eq!(fam.arity(), 9);
        assert_eq!(fam.kappa_index(0, 1), 6);
        assert_eq!(fam.kappa_index(0, 2), 7);
        assert_eq!(fam.kappa_index(1, 2), 8);
        assert_eq!(fam.kappa_index(2, 1), 8); // symmetric alias
    }

    #[test]
    fn contact_gate_suppresses_distant_coupling() {
        let fam = OdeFamily::coupled_pendulum(2).with_contact_window(0.1);
        let p = pv(fam.clone(), &[19.62, 19.62, 0.0, 0.0, 50.0]);
        let far = StateVector::second_order(vec![0.8, -0.8], vec![0.0, 0.0]);
        let d = rhs(&fam, &p, &far).unwrap();
        // Outside the window the bodies behave as free pendulums.
        assert!((d.velocities[0] + 19.62 * 0.8f64.sin()).abs() < 1e-12);
        let near = StateVector::second_order(vec![0.02, -0.02], vec![0.0, 0.0]);
        let d = rhs(&fam, &p, &near).unwrap();
        assert!((d.velocities[0] + 19.62 * 0.02f64.sin() + 50.0 * 0.04).abs() < 1e-12);
    }

    #[test]
    fn family_tag_round_trips_snake_case() {
        for tag in FamilyTag::ALL {
            let s = tag.as_str();
            assert_eq!(s.parse::<FamilyTag>().unwrap(), tag);
            let json = serde_json::to_string(&tag).unwrap();
            assert_eq!(json, format!("\"{s}\""));
        }
    }
}
