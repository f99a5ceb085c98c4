//! Ground-truth fitting procedures: exponential decay envelopes for
//! damping, friction inversion from measured acceleration, polynomial
//! acceleration fits, and the exact pendulum period through the complete
//! elliptic integral of the first kind.

use crate::error::{Error, Result};
use crate::fit::extract_period;
use crate::linalg::{lstsq, solve, Mat};
use crate::trajectory::Trajectory;

/// Complete elliptic integral of the first kind, modulus convention:
///
/// ```text
/// K(k) = ∫₀^{π/2} dφ / √(1 − k² sin²φ) = π / (2·AGM(1, √(1−k²)))
/// ```
///
/// The arithmetic-geometric mean converges quadratically; iteration stops
/// at relative tolerance 1e-12. K(0) = π/2, K(k) → ∞ as |k| → 1.
pub fn elliptic_k(k: f64) -> f64 {
    let k2 = k * k;
    if k2 >= 1.0 {
        return f64::INFINITY;
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - k2).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-12 * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
    }
    std::f64::consts::PI / (2.0 * a)
}

/// Exact period of a pendulum released from rest at amplitude `theta0`:
/// T = 4·√(L/g)·K(sin(θ₀/2)).
pub fn exact_period(length: f64, g: f64, theta0: f64) -> Result<f64> {
    if !(length > 0.0) || !(g > 0.0) {
        return Err(Error::Domain("length and g must be positive".into()));
    }
    if !(0.0..std::f64::consts::PI).contains(&theta0) {
        return Err(Error::Domain(format!(
            "amplitude must lie in [0, pi), got {theta0}"
        )));
    }
    Ok(4.0 * (length / g).sqrt() * elliptic_k((theta0 / 2.0).sin()))
}

/// Rope length recovered from a measured period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthEstimate {
    /// Small-angle estimate L = g·(T/2π)².
    pub small_angle: f64,
    /// Amplitude-corrected estimate L = g·(T / (4·K(sin(θ₀/2))))².
    pub corrected: f64,
}

/// Invert the period for L, both with the small-angle formula and with the
/// exact-period amplitude correction at release angle `theta0`.
pub fn corrected_length(t_measured: f64, theta0: f64, g: f64) -> Result<LengthEstimate> {
    if !(t_measured > 0.0) {
        return Err(Error::Domain("period must be positive".into()));
    }
    if !(0.0..std::f64::consts::PI).contains(&theta0) {
        return Err(Error::Domain(format!(
            "amplitude must lie in [0, pi), got {theta0}"
        )));
    }
    let small_angle = g * (t_measured / (2.0 * std::f64::consts::PI)).powi(2);
    let k = elliptic_k((theta0 / 2.0).sin());
    let corrected = g * (t_measured / (4.0 * k)).powi(2);
    Ok(LengthEstimate {
        small_angle,
        corrected,
    })
}

/// Friction coefficient from the measured acceleration of a body sliding
/// down an incline at `alpha_deg` degrees: μ = tan α − a / (g·cos α).
pub fn friction_from_accel(alpha_deg: f64, a_measured: f64, g: f64) -> Result<f64> {
    if !(alpha_deg > 0.0 && alpha_deg < 90.0) {
        return Err(Error::Domain(format!(
            "incline angle must lie in (0, 90) degrees, got {alpha_deg}"
        )));
    }
    if !(g > 0.0) {
        return Err(Error::Domain("g must be positive".into()));
    }
    let alpha = alpha_deg.to_radians();
    Ok(alpha.tan() - a_measured / (g * alpha.cos()))
}

/// Acceleration from a second-order polynomial fit x(t) = c₀ + c₁t + c₂t²
/// to the body-0 position series; returns a = 2c₂.
pub fn poly_accel_fit(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 5 {
        return Err(Error::TooShort {
            needed: 5,
            got: traj.len(),
        });
    }
    let mut rows = Vec::with_capacity(traj.len());
    let mut b = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let t = traj.time(i);
        rows.push(vec![1.0, t, t * t]);
        b.push(traj.positions[i][0]);
    }
    let c = lstsq(&Mat::from_rows(&rows), &b)?;
    Ok(2.0 * c[2])
}

/// Levenberg-Marquardt on a residual/Jacobian model.
///
/// Standard damping schedule: λ starts at 1e-3, ×10 on a rejected step,
/// ÷10 on an accepted one; stops after `max_iter` iterations or when the
/// gradient ‖Jᵀr‖∞ falls below `grad_tol`.
pub fn levenberg_marquardt<F>(
    model: F,
    init: &[f64],
    max_iter: usize,
    grad_tol: f64,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> (Vec<f64>, Mat),
{
    let p = init.len();
    let mut params = init.to_vec();
    let mut lambda = 1e-3;
    let (mut res, mut jac) = model(&params);
    let mut cost = res.iter().map(|r| r * r).sum::<f64>();
    for _ in 0..max_iter {
        // Normal equations JᵀJ δ = −Jᵀr with Marquardt diagonal damping.
        let mut jtj = Mat::zeros(p, p);
        let mut jtr = vec![0.0; p];
        for r in 0..res.len() {
            for i in 0..p {
                for j in 0..p {
                    jtj[(i, j)] += jac[(r, i)] * jac[(r, j)];
                }
                jtr[i] += jac[(r, i)] * res[r];
            }
        }
        if jtr.iter().fold(0.0f64, |m, g| m.max(g.abs())) < grad_tol {
            break;
        }
        let mut damped = jtj.clone();
        for i in 0..p {
            let d = jtj[(i, i)].max(1e-12);
            damped[(i, i)] += lambda * d;
        }
        let neg_jtr: Vec<f64> = jtr.iter().map(|g| -g).collect();
        let delta = match solve(&damped, &neg_jtr) {
            Ok(d) => d,
            Err(_) => {
                lambda *= 10.0;
                continue;
            }
        };
        let trial: Vec<f64> = params.iter().zip(&delta).map(|(a, d)| a + d).collect();
        let (trial_res, trial_jac) = model(&trial);
        let trial_cost = trial_res.iter().map(|r| r * r).sum::<f64>();
        if trial_cost < cost && trial_cost.is_finite() {
            params = trial;
            res = trial_res;
            jac = trial_jac;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    Ok(params)
}

/// Result of fitting the decay envelope A(t) = A₀·e^{−ζt/2} to oscillation
/// peak amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFit {
    pub a0: f64,
    /// Damping coefficient ζ (note the ζ/2 envelope convention). A negative
    /// value flags a non-decaying signal; it is returned, not an error.
    pub zeta: f64,
    /// Half-width of the 95% confidence interval on ζ across repeated
    /// trials; `None` for a single-trajectory fit (see [`aggregate_envelopes`]).
    pub ci95: Option<f64>,
    pub peaks_used: usize,
}

impl EnvelopeFit {
    pub fn is_decaying(&self) -> bool {
        self.zeta >= 0.0
    }
}

/// Fit the exponential decay envelope of an oscillatory trajectory.
///
/// Peaks are local maxima of the |mean-subtracted| body-0 signal separated
/// by at least 0.4 extracted periods. A log-linear least-squares fit seeds
/// a Levenberg-Marquardt refinement of (A₀, ζ) on the exponential form.
pub fn fit_envelope(traj: &Trajectory) -> Result<EnvelopeFit> {
    let period = extract_period(traj)?;
    let series = traj.body_series(0);
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let s: Vec<f64> = series.iter().map(|z| (z - mean).abs()).collect();

    let min_sep = ((0.4 * period / traj.dt).round() as usize).max(1);
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for i in 1..s.len() - 1 {
        if s[i] > s[i - 1] && s[i] >= s[i + 1] && s[i] > 0.0 {
            match peaks.last() {
                Some(&(last_i, last_a)) if i - last_i < min_sep => {
                    if s[i] > last_a {
                        *peaks.last_mut().unwrap() = (i, s[i]);
                    }
                }
                _ => peaks.push((i, s[i])),
            }
        }
    }
    if peaks.len() < 3 {
        return Err(Error::IllPosed(format!(
            "envelope fit needs at least 3 peaks, found {}",
            peaks.len()
        )));
    }

    // Log-linear seed: ln A_i = ln A₀ − (ζ/2)·t_i.
    let mut rows = Vec::with_capacity(peaks.len());
    let mut b = Vec::with_capacity(peaks.len());
    for &(i, a) in &peaks {
        rows.push(vec![1.0, traj.time(i)]);
        b.push(a.ln());
    }
    let c = lstsq(&Mat::from_rows(&rows), &b)?;
    let seed = [c[0].exp(), -2.0 * c[1]];

    let times: Vec<f64> = peaks.iter().map(|&(i, _)| traj.time(i)).collect();
    let amps: Vec<f64> = peaks.iter().map(|&(_, a)| a).collect();
    let model = |p: &[f64]| -> (Vec<f64>, Mat) {
        let (a0, zeta) = (p[0], p[1]);
        let mut res = Vec::with_capacity(times.len());
        let mut jac = Mat::zeros(times.len(), 2);
        for (r, (&t, &a)) in times.iter().zip(&amps).enumerate() {
            let e = (-zeta * t / 2.0).exp();
            res.push(a0 * e - a);
            jac[(r, 0)] = e;
            jac[(r, 1)] = -a0 * t / 2.0 * e;
        }
        (res, jac)
    };
    let fitted = levenberg_marquardt(model, &seed, 200, 1e-10)?;

    Ok(EnvelopeFit {
        a0: fitted[0],
        zeta: fitted[1],
        ci95: None,
        peaks_used: peaks.len(),
    })
}

/// Aggregate per-trial envelope fits: mean ζ with its 95% confidence
/// half-width (1.96·s/√n) across trials.
pub fn aggregate_envelopes(fits: &[EnvelopeFit]) -> Result<EnvelopeFit> {
    if fits.is_empty() {
        return Err(Error::IllPosed("no envelope fits to aggregate".into()));
    }
    let n = fits.len() as f64;
    let zeta = fits.iter().map(|f| f.zeta).sum::<f64>() / n;
    let a0 = fits.iter().map(|f| f.a0).sum::<f64>() / n;
    let ci95 = if fits.len() > 1 {
        let var = fits.iter().map(|f| (f.zeta - zeta).powi(2)).sum::<f64>() / (n - 1.0);
        Some(1.96 * var.sqrt() / n.sqrt())
    } else {
        Some(0.0)
    };
    Ok(EnvelopeFit {
        a0,
        zeta,
        ci95,
        peaks_used: fits.iter().map(|f| f.peaks_used).min().unwrap_or(0),
    })
}
