//! Per-clip parameter estimation.
//!
//! Training minimizes a position-only prediction loss: from each observed
//! window the physics step is unrolled k = 1..K steps and compared against
//! the later observed positions, weighted per horizon. Gradients with
//! respect to the physics parameters are assembled analytically from the
//! step Jacobians, so the uncorrected Euler variant reproduces its severed
//! gradient flow exactly: the one-step position prediction carries no
//! parameter dependence and the gradient is identically zero.
//!
//! Start-state velocities are reconstructed from positions with the scheme
//! matched to the integrator. The Euler variants get backward differences:
//! a corrected-Euler rollout satisfies z_t − z_{t−1} = Δt·ż_t exactly, so
//! backward differencing recovers the internal velocity without error, and
//! on exact data the Δt² position update is only a consistent estimator
//! when paired with the backward difference (central differencing drives
//! the fitted parameters to half their true values — an exact identity on
//! parabolas). Verlet and RK4 carry the textbook ½Δt² term and pair with
//! central differences instead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gtfit::levenberg_marquardt;
use crate::integrate::{step_with_jacobians, IntegratorKind, DIVERGENCE_LIMIT};
use crate::linalg::{lstsq, Mat};
use crate::metrics::ode_residual;
use crate::ode::{closed_form, FamilyTag, OdeFamily, ParamVector, StateVector};
use crate::trajectory::{Trajectory, VelocityScheme};

/// Loss value substituted when an unroll diverges.
pub const GUARD_LOSS: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    OneStep,
    MultiStep,
}

impl LossKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LossKind::OneStep => "one-step",
            LossKind::MultiStep => "multi-step",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-step" => Ok(LossKind::OneStep),
            "multi-step" => Ok(LossKind::MultiStep),
            other => Err(Error::Domain(format!("unknown loss `{other}`"))),
        }
    }
}

/// Horizon weights w₁..w_K: 1, 1, 0.5, 0.5, 0.25, ... (pairwise halving),
/// giving [1, 1, 0.5, 0.5, 0.25] at K = 5.
pub fn default_weights(k: usize) -> Vec<f64> {
    (0..k).map(|i| 0.5f64.powi(i as i32 / 2)).collect()
}

/// Default optimizer start: 0.5 for stiffness-like coefficients, 0.05 for
/// rate-like ones — (0.5, 0.05) for the two-parameter families.
pub fn default_init(family: &OdeFamily) -> ParamVector {
    let values = if family.arity() == 1 {
        vec![0.5]
    } else {
        family
            .param_time_orders()
            .iter()
            .map(|&o| if o == 1 { 0.05 } else { 0.5 })
            .collect()
    };
    ParamVector::new(family.clone(), values).expect("default init")
}

/// Velocity reconstruction matched to the integrator (see module docs).
pub fn velocity_scheme_for(kind: IntegratorKind) -> VelocityScheme {
    match kind {
        IntegratorKind::EulerUncorrected | IntegratorKind::EulerCorrected => {
            VelocityScheme::Backward
        }
        IntegratorKind::StormerVerlet | IntegratorKind::Rk4 => VelocityScheme::Central,
    }
}

#[derive(Debug, Clone)]
pub struct LossValue {
    pub loss: f64,
    pub grad: Vec<f64>,
    pub diverged: bool,
}

/// Multi-step rollout loss Σₖ wₖ · meanₜ ‖ẑ_{t+k} − z̃_{t+k}‖² with its
/// analytic parameter gradient. Supervises position components only; the
/// unroll carries the internal velocity state.
pub fn multi_step_loss(
    family: &OdeFamily,
    params: &ParamVector,
    traj: &Trajectory,
    integrator: IntegratorKind,
    horizon: usize,
    weights: &[f64],
) -> Result<LossValue> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be >= 1".into()));
    }
    if weights.len() != horizon {
        return Err(Error::Domain(format!(
            "expected {horizon} weights, got {}",
            weights.len()
        )));
    }
    if traj.body_count() != family.body_count {
        return Err(Error::BodyCountMismatch {
            family: family.tag.to_string(),
            expected: family.body_count,
            got: traj.body_count(),
        });
    }
    let len = traj.len();
    if len < horizon + 2 {
        return Err(Error::TooShort {
            needed: horizon + 2,
            got: len,
        });
    }
    let second = family.tag.is_second_order();
    let scheme = velocity_scheme_for(integrator);
    let n = family.body_count;
    let p = family.arity();
    let t_first = if second { 1 } else { 0 };

    // Per-horizon accumulators: sum of squared errors and gradient sums.
    let mut sums = vec![0.0; horizon];
    let mut counts = vec![0usize; horizon];
    let mut grads = vec![vec![0.0; p]; horizon];

    for t in t_first..len - horizon {
        let mut state = traj.state_at(t, scheme, second);
        // Sensitivity of the current unrolled state to the parameters.
        let mut sens = Mat::zeros(family.state_dim(), p);
        for k in 1..=horizon {
            let sj = step_with_jacobians(integrator, family, params, &state, traj.dt)?;
            let mut new_sens = sj.d_state.matmul(&sens);
            new_sens.add_scaled(&sj.d_params, 1.0);
            sens = new_sens;
            state = sj.next;
            if !state.is_finite() || state.max_abs() > DIVERGENCE_LIMIT {
                return Ok(LossValue {
                    loss: GUARD_LOSS,
                    grad: vec![0.0; p],
                    diverged: true,
                });
            }
            let target = &traj.positions[t + k];
            for b in 0..n {
                let err = state.positions[b] - target[b];
                sums[k - 1] += err * err;
                for j in 0..p {
                    grads[k - 1][j] += 2.0 * err * sens[(b, j)];
                }
            }
            counts[k - 1] += 1;
        }
    }

    let mut loss = 0.0;
    let mut grad = vec![0.0; p];
    for k in 0..horizon {
        let c = counts[k].max(1) as f64;
        loss += weights[k] * sums[k] / c;
        for j in 0..p {
            grad[j] += weights[k] * grads[k][j] / c;
        }
    }
    Ok(LossValue {
        loss,
        grad,
        diverged: false,
    })
}

/// One-step prediction loss: [`multi_step_loss`] at K = 1, w = [1].
pub fn one_step_loss(
    family: &OdeFamily,
    params: &ParamVector,
    traj: &Trajectory,
    integrator: IntegratorKind,
) -> Result<LossValue> {
    multi_step_loss(family, params, traj, integrator, 1, &[1.0])
}

/// Identification of one fitted clip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClipId {
    pub phenomenon: String,
    pub setting: String,
    pub trial: usize,
    pub seed: u64,
}

impl ClipId {
    pub fn new(phenomenon: &str, setting: &str, trial: usize, seed: u64) -> Self {
        Self {
            phenomenon: phenomenon.to_string(),
            setting: setting.to_string(),
            trial,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub loss: LossKind,
    pub horizon: usize,
    pub weights: Vec<f64>,
    pub integrator: IntegratorKind,
    pub epochs: usize,
    pub lr_params: f64,
    pub seed: u64,
    pub init_params: ParamVector,
}

impl FitConfig {
    pub fn one_step(family: &OdeFamily) -> Self {
        Self {
            loss: LossKind::OneStep,
            horizon: 1,
            weights: vec![1.0],
            integrator: IntegratorKind::EulerCorrected,
            epochs: 500,
            lr_params: 1e-2,
            seed: 42,
            init_params: default_init(family),
        }
    }

    pub fn multi_step(family: &OdeFamily, horizon: usize) -> Self {
        Self {
            loss: LossKind::MultiStep,
            horizon,
            weights: default_weights(horizon),
            ..Self::one_step(family)
        }
    }

    pub fn with_integrator(mut self, kind: IntegratorKind) -> Self {
        self.integrator = kind;
        self
    }

    pub fn with_init(mut self, values: Vec<f64>) -> Self {
        let family = self.init_params.family.clone();
        self.init_params = ParamVector::new(family, values).expect("init arity");
        self
    }

    fn validate(&self) -> Result<()> {
        if self.loss == LossKind::OneStep && self.horizon != 1 {
            return Err(Error::Domain(
                "one-step loss requires horizon = 1".into(),
            ));
        }
        if self.horizon == 0 || self.weights.len() != self.horizon {
            return Err(Error::Domain("weights must match the horizon".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Domain("epochs must be >= 1".into()));
        }
        if !(self.lr_params > 0.0) {
            return Err(Error::Domain("learning rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub final_params: ParamVector,
    /// Loss evaluated at the start of each epoch.
    pub loss_curve: Vec<f64>,
    /// ℓ₂ norm of the parameter gradient at the start of each epoch.
    pub grad_norm_curve: Vec<f64>,
    /// Converged one-step physics residual at the final parameters.
    pub ode_residual: f64,
    pub diverged: bool,
    pub clip_id: ClipId,
}

/// Fit one clip from scratch with Adam (β₁ = 0.9, β₂ = 0.999, ε = 1e-8).
///
/// Full-batch and RNG-free, so the result is a deterministic function of
/// (trajectory, config). Sign-constrained families are projected onto the
/// feasible set after every step. On divergence the run stops with partial
/// curves and `diverged` set.
pub fn fit_clip(
    family: &OdeFamily,
    traj: &Trajectory,
    config: &FitConfig,
    clip_id: ClipId,
) -> Result<FitResult> {
    config.validate()?;
    if config.init_params.family.tag != family.tag
        || config.init_params.len() != family.arity()
    {
        return Err(Error::ArityMismatch {
            family: family.tag.to_string(),
            expected: family.arity(),
            got: config.init_params.len(),
        });
    }
    let p = family.arity();
    let mut params = ParamVector::new(family.clone(), config.init_params.values.clone())?;
    let mut m = vec![0.0; p];
    let mut v = vec![0.0; p];
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let mut loss_curve = Vec::with_capacity(config.epochs);
    let mut grad_norm_curve = Vec::with_capacity(config.epochs);
    let mut diverged = false;

    for epoch in 0..config.epochs {
        let lv = multi_step_loss(
            family,
            &params,
            traj,
            config.integrator,
            config.horizon,
            &config.weights,
        )?;
        let grad_norm = lv.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        loss_curve.push(lv.loss);
        grad_norm_curve.push(grad_norm);
        if lv.diverged || !lv.loss.is_finite() || !grad_norm.is_finite() {
            diverged = true;
            break;
        }
        let t = (epoch + 1) as f64;
        let bc1 = 1.0 - beta1.powf(t);
        let bc2 = 1.0 - beta2.powf(t);
        for j in 0..p {
            m[j] = beta1 * m[j] + (1.0 - beta1) * lv.grad[j];
            v[j] = beta2 * v[j] + (1.0 - beta2) * lv.grad[j] * lv.grad[j];
            let m_hat = m[j] / bc1;
            let v_hat = v[j] / bc2;
            params.values[j] -= config.lr_params * m_hat / (v_hat.sqrt() + eps);
        }
        params.project_feasible();
    }

    let residual = ode_residual(traj, family, &params, traj.dt).unwrap_or(f64::INFINITY);
    Ok(FitResult {
        final_params: params,
        loss_curve,
        grad_norm_curve,
        ode_residual: residual,
        diverged,
        clip_id,
    })
}

/// Direct least-squares estimate from finite-difference derivatives:
/// the independent oracle for [`fit_clip`] on the linear-in-time families.
///
/// Central differences, endpoints excluded. For the apparent-radius model
/// the camera distance h₀ is pinned to the rig convention (1.0): the model
/// is scale-degenerate in (g, r₀f, h₀), so only two combinations are
/// observable and (g, r₀f) are fitted by Levenberg-Marquardt.
pub fn direct_ls_fit(family: &OdeFamily, traj: &Trajectory) -> Result<ParamVector> {
    if traj.len() < 5 {
        return Err(Error::TooShort {
            needed: 5,
            got: traj.len(),
        });
    }
    if traj.body_count() != family.body_count {
        return Err(Error::BodyCountMismatch {
            family: family.tag.to_string(),
            expected: family.body_count,
            got: traj.body_count(),
        });
    }
    match family.tag {
        FamilyTag::SecondOrderLinear => {
            let mut rows = Vec::new();
            let mut rhs_col = Vec::new();
            for t in 1..traj.len() - 1 {
                rows.push(vec![-traj.positions[t][0], -traj.velocity_central(t, 0)]);
                rhs_col.push(traj.accel_central(t, 0));
            }
            let x = lstsq(&Mat::from_rows(&rows), &rhs_col)?;
            ParamVector::new(family.clone(), x)
        }
        FamilyTag::ConstantAccel => {
            let mut rows = Vec::new();
            let mut rhs_col = Vec::new();
            for t in 1..traj.len() - 1 {
                rows.push(vec![1.0]);
                rhs_col.push(traj.accel_central(t, 0));
            }
            let x = lstsq(&Mat::from_rows(&rows), &rhs_col)?;
            ParamVector::new(family.clone(), x)
        }
        FamilyTag::FirstOrderDecay => {
            let mut rows = Vec::new();
            let mut rhs_col = Vec::new();
            for t in 1..traj.len() - 1 {
                rows.push(vec![-traj.positions[t][0]]);
                rhs_col.push(traj.velocity_central(t, 0));
            }
            let x = lstsq(&Mat::from_rows(&rows), &rhs_col)?;
            ParamVector::new(family.clone(), vec![x[0].max(0.0)])
        }
        FamilyTag::FallingBallRadius => {
            let series = traj.body_series(0);
            let times: Vec<f64> = (0..traj.len()).map(|i| traj.time(i)).collect();
            let r0 = series[0].abs().max(1e-12);
            // Crude curvature-based start for g/(2 h0), refined by LM.
            let mid = traj.len() / 2;
            let b0 = if series[mid].abs() > 1e-12 {
                ((r0 / series[mid]).max(1.0) - 1.0) / times[mid].powi(2).max(1e-12)
            } else {
                1.0
            };
            let model = |p: &[f64]| -> (Vec<f64>, Mat) {
                let (g, r0f) = (p[0], p[1]);
                let mut res = Vec::with_capacity(series.len());
                let mut jac = Mat::zeros(series.len(), 2);
                for (i, (&t, &r)) in times.iter().zip(&series).enumerate() {
                    let denom = 1.0 + 0.5 * g * t * t;
                    res.push(r0f / denom - r);
                    jac[(i, 0)] = -r0f * 0.5 * t * t / (denom * denom);
                    jac[(i, 1)] = 1.0 / denom;
                }
                (res, jac)
            };
            let fitted = levenberg_marquardt(model, &[2.0 * b0, r0], 200, 1e-12)?;
            ParamVector::new(family.clone(), vec![fitted[0], fitted[1], 1.0])
        }
        _ => Err(Error::UnsupportedFamily {
            family: family.tag.to_string(),
            op: "direct_ls_fit",
        }),
    }
}

/// Mean interval between successive upward zero crossings of the
/// mean-subtracted position signal, with linear sub-sample interpolation
/// of the crossing times.
pub fn extract_period(traj: &Trajectory) -> Result<f64> {
    let series = traj.body_series(0);
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let s: Vec<f64> = series.iter().map(|z| z - mean).collect();
    let mut crossings = Vec::new();
    for i in 0..s.len() - 1 {
        if s[i] < 0.0 && s[i + 1] >= 0.0 {
            let frac = -s[i] / (s[i + 1] - s[i]);
            crossings.push(traj.time(i) + frac * traj.dt);
        }
    }
    if crossings.len() < 2 {
        return Err(Error::IllPosed(format!(
            "need at least 2 upward zero crossings, found {}",
            crossings.len()
        )));
    }
    let span = crossings.last().unwrap() - crossings.first().unwrap();
    Ok(span / (crossings.len() - 1) as f64)
}

/// Model residual of the algebraic apparent-radius fit (used when scoring
/// the family against candidates that are ranked by stepper residuals).
pub fn closed_form_mse(family: &OdeFamily, params: &ParamVector, traj: &Trajectory) -> Result<f64> {
    let mut sum = 0.0;
    let initial = StateVector::first_order(traj.positions[0].clone());
    for i in 0..traj.len() {
        let m = closed_form(family, params, &initial, traj.time(i) - traj.t0)?;
        for (b, z) in m.positions.iter().enumerate() {
            let e = z - traj.positions[i][b];
            sum += e * e;
        }
    }
    Ok(sum / traj.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::rollout;
    use crate::synth::{generate, ClipSpec};

    fn noiseless_spec(family: OdeFamily, values: &[f64], initial: StateVector, dt: f64, duration: f64) -> ClipSpec {
        ClipSpec {
            phenomenon: "test".into(),
            setting: "unit".into(),
            true_params: ParamVector::new(family.clone(), values.to_vec()).unwrap(),
            family,
            initial,
            dt,
            duration,
            noise_std: 0.0,
            trial_count: 1,
            jitter_frac: 0.0,
            units: "latent".into(),
            fit_init: None,
        }
    }

    fn one_clip(spec: &ClipSpec) -> Trajectory {
        generate(spec, 42).unwrap().clips.remove(0).1
    }

    #[test]
    fn default_weights_match_k5() {
        assert_eq!(default_weights(5), vec![1.0, 1.0, 0.5, 0.5, 0.25]);
        assert_eq!(default_weights(1), vec![1.0]);
    }

    #[test]
    fn self_consistency_loss_is_tiny() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let spec = noiseless_spec(
            fam.clone(),
            &[1.0, 0.1],
            StateVector::second_order(vec![1.0], vec![0.0]),
            0.002,
            2.0,
        );
        let traj = one_clip(&spec);
        let lv = one_step_loss(&fam, &spec.true_params, &traj, IntegratorKind::EulerCorrected)
            .unwrap();
        assert!(lv.loss < 1e-6, "loss = {}", lv.loss);
    }

    #[test]
    fn buggy_euler_gradient_is_exactly_zero() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let spec = noiseless_spec(
            fam.clone(),
            &[1.0, 0.1],
            StateVector::second_order(vec![1.0], vec![0.0]),
            1.0 / 60.0,
            2.0,
        );
        let traj = one_clip(&spec);
        let p = ParamVector::new(fam.clone(), vec![0.5, 0.05]).unwrap();
        let lv = one_step_loss(&fam, &p, &traj, IntegratorKind::EulerUncorrected).unwrap();
        assert_eq!(lv.grad, vec![0.0, 0.0]);
        assert!(lv.loss > 0.0);
    }

    #[test]
    fn multi_step_at_k1_equals_one_step_bitwise() {
        let fam = OdeFamily::single(FamilyTag::NonlinearPendulum);
        let spec = noiseless_spec(
            fam.clone(),
            &[19.62, 0.02],
            StateVector::second_order(vec![0.6], vec![0.0]),
            1.0 / 60.0,
            2.0,
        );
        let traj = one_clip(&spec);
        let p = ParamVector::new(fam.clone(), vec![10.0, 0.05]).unwrap();
        for kind in [IntegratorKind::EulerCorrected, IntegratorKind::Rk4] {
            let a = one_step_loss(&fam, &p, &traj, kind).unwrap();
            let b = multi_step_loss(&fam, &p, &traj, kind, 1, &[1.0]).unwrap();
            assert_eq!(a.loss, b.loss);
            assert_eq!(a.grad, b.grad);
        }
    }

    #[test]
    fn fit_recovers_oscillator_params() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let spec = noiseless_spec(
            fam.clone(),
            &[1.0, 0.1],
            StateVector::second_order(vec![1.0], vec![0.0]),
            1.0 / 60.0,
            10.0,
        );
        let traj = one_clip(&spec);
        let config = FitConfig::one_step(&fam);
        let fit = fit_clip(&fam, &traj, &config, ClipId::new("test", "unit", 0, 42)).unwrap();
        assert!(!fit.diverged);
        let a = fit.final_params.values[0];
        let b = fit.final_params.values[1];
        assert!((a - 1.0).abs() / 1.0 < 0.01, "alpha = {a}");
        assert!((b - 0.1).abs() / 0.1 < 0.01, "beta = {b}");
    }

    #[test]
    fn buggy_fit_freezes_at_init() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let spec = noiseless_spec(
            fam.clone(),
            &[1.0, 0.1],
            StateVector::second_order(vec![1.0], vec![0.0]),
            1.0 / 60.0,
            5.0,
        );
        let traj = one_clip(&spec);
        let mut config = FitConfig::one_step(&fam);
        config.integrator = IntegratorKind::EulerUncorrected;
        config.epochs = 120;
        let fit = fit_clip(&fam, &traj, &config, ClipId::new("test", "unit", 0, 42)).unwrap();
        assert_eq!(fit.final_params.values, vec![0.5, 0.05]);
        assert!(fit.grad_norm_curve.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn fit_is_deterministic() {
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let spec = noiseless_spec(
            fam.clone(),
            &[1.0],
            StateVector::first_order(vec![1.0]),
            0.01,
            3.0,
        );
        let traj = one_clip(&spec);
        let mut config = FitConfig::one_step(&fam);
        config.epochs = 100;
        let a = fit_clip(&fam, &traj, &config, ClipId::new("t", "u", 0, 42)).unwrap();
        let b = fit_clip(&fam, &traj, &config, ClipId::new("t", "u", 0, 42)).unwrap();
        assert_eq!(a.final_params.values, b.final_params.values);
        assert_eq!(a.loss_curve, b.loss_curve);
    }

    #[test]
    fn direct_ls_matches_undamped_oscillator() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = ParamVector::new(fam.clone(), vec![2.0, 0.0]).unwrap();
        let init = StateVector::second_order(vec![1.0], vec![0.0]);
        let r = rollout(IntegratorKind::Rk4, &fam, &p, &init, 0.005, 1200).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let est = direct_ls_fit(&fam, &traj).unwrap();
        assert!((est.values[0] - 2.0).abs() < 1e-3, "alpha = {}", est.values[0]);
        assert!(est.values[1].abs() < 1e-3, "beta = {}", est.values[1]);
    }

    #[test]
    fn direct_ls_truncation_shrinks_with_dt() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = ParamVector::new(fam.clone(), vec![2.0, 0.0]).unwrap();
        let init = StateVector::second_order(vec![1.0], vec![0.0]);
        let err_at = |dt: f64| {
            let steps = (6.0 / dt) as usize;
            let r = rollout(IntegratorKind::Rk4, &fam, &p, &init, dt, steps).unwrap();
            let traj = Trajectory::from_rollout(&r);
            (direct_ls_fit(&fam, &traj).unwrap().values[0] - 2.0).abs()
        };
        let (e1, e2) = (err_at(0.02), err_at(0.01));
        // O(Δt²): halving the step should shrink the error by ~4.
        let ratio = e1 / e2;
        assert!(ratio > 3.0 && ratio < 5.0, "ratio = {ratio}");
    }

    #[test]
    fn direct_ls_rejects_constant_trajectory() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let traj = Trajectory::new(0.1, 0.0, vec![vec![1.0]; 50]).unwrap();
        assert!(matches!(
            direct_ls_fit(&fam, &traj),
            Err(Error::IllPosed(_))
        ));
    }

    #[test]
    fn extract_period_pure_cosine() {
        let t0 = 0.73;
        let dt = t0 / 100.0;
        let positions: Vec<Vec<f64>> = (0..400)
            .map(|i| vec![(2.0 * std::f64::consts::PI * i as f64 * dt / t0).cos()])
            .collect();
        let traj = Trajectory::new(dt, 0.0, positions).unwrap();
        let period = extract_period(&traj).unwrap();
        assert!((period - t0).abs() / t0 < 1e-3, "period = {period}");
    }

    #[test]
    fn extract_period_constant_errors() {
        let traj = Trajectory::new(0.1, 0.0, vec![vec![2.0]; 60]).unwrap();
        assert!(extract_period(&traj).is_err());
    }

    #[test]
    fn small_angle_pendulum_period() {
        let fam = OdeFamily::single(FamilyTag::NonlinearPendulum);
        let p = ParamVector::new(fam.clone(), vec![9.81 / 0.5, 0.0]).unwrap();
        let init = StateVector::second_order(vec![0.05], vec![0.0]);
        let r = rollout(IntegratorKind::Rk4, &fam, &p, &init, 1.0 / 240.0, 2400).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let period = extract_period(&traj).unwrap();
        let expect = 2.0 * std::f64::consts::PI * (0.5f64 / 9.81).sqrt();
        assert!((period - expect).abs() / expect < 0.01, "T = {period}");
    }
}
