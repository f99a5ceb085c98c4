//! The evaluation axes: parameter accuracy (MAE/σ), physics residuals,
//! extrapolation beyond the training window, residual-based equation
//! selection, and confusion-matrix bookkeeping, plus the aggregation of
//! per-clip results into a benchmark report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{
    closed_form_mse, default_init, direct_ls_fit, fit_clip, velocity_scheme_for, ClipId,
    FitConfig,
};
use crate::integrate::{step, IntegratorKind, DIVERGENCE_LIMIT};
use crate::io::ResultsRow;
use crate::linalg::{lstsq, Mat};
use crate::ode::{FamilyTag, OdeFamily, ParamVector};
use crate::trajectory::Trajectory;

/// Mean absolute error against ground truth with the estimate spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaeSummary {
    pub mae: f64,
    /// Sample standard deviation of the estimates (0 for a single clip).
    pub sigma: f64,
    pub n: usize,
}

pub fn mae(estimates: &[f64], gt: f64) -> Result<MaeSummary> {
    if estimates.is_empty() {
        return Err(Error::Domain("mae over an empty estimate list".into()));
    }
    let n = estimates.len() as f64;
    let mae = estimates.iter().map(|e| (e - gt).abs()).sum::<f64>() / n;
    let mean = estimates.iter().sum::<f64>() / n;
    let sigma = if estimates.len() > 1 {
        (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(MaeSummary {
        mae,
        sigma,
        n: estimates.len(),
    })
}

/// One-step physics residual: the mean squared error of predicting each
/// next observed position with a single corrected-Euler step from the
/// observed state (backward-difference velocities). Zero for a trajectory
/// produced by that same discrete stepper.
pub fn ode_residual(
    traj: &Trajectory,
    family: &OdeFamily,
    params: &ParamVector,
    dt: f64,
) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
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
    let second = family.tag.is_second_order();
    let t_first = if second { 1 } else { 0 };
    if traj.len() < t_first + 2 {
        return Err(Error::TooShort {
            needed: t_first + 2,
            got: traj.len(),
        });
    }
    let kind = IntegratorKind::EulerCorrected;
    let scheme = velocity_scheme_for(kind);
    let mut sum = 0.0;
    let mut count = 0usize;
    for t in t_first..traj.len() - 1 {
        let state = traj.state_at(t, scheme, second);
        let pred = step(kind, family, params, &state, dt)?;
        if !pred.is_finite() {
            return Ok(f64::INFINITY);
        }
        for b in 0..traj.body_count() {
            let e = pred.positions[b] - traj.positions[t + 1][b];
            sum += e * e;
        }
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Extrapolation error Eₖ = ‖ẑₖ − z̃ₖ‖²: unroll the fitted dynamics from
/// the last training frame and compare positions against the held-out
/// samples at the requested horizons.
pub fn extrapolation_error(
    traj: &Trajectory,
    family: &OdeFamily,
    params: &ParamVector,
    integrator: IntegratorKind,
    t_train: usize,
    ks: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let max_k = ks.iter().copied().max().unwrap_or(0);
    if max_k == 0 {
        return Err(Error::Domain("need at least one horizon".into()));
    }
    if traj.len() <= t_train + max_k {
        return Err(Error::TooShort {
            needed: t_train + max_k + 1,
            got: traj.len(),
        });
    }
    if t_train < 2 {
        return Err(Error::Domain("training window must cover >= 2 frames".into()));
    }
    let second = family.tag.is_second_order();
    let origin = t_train - 1;
    let mut state = traj.state_at(origin, velocity_scheme_for(integrator), second);
    let mut out = Vec::with_capacity(ks.len());
    let mut diverged = false;
    for k in 1..=max_k {
        if !diverged {
            state = step(integrator, family, params, &state, traj.dt)?;
            if !state.is_finite() || state.max_abs() > DIVERGENCE_LIMIT {
                diverged = true;
            }
        }
        if ks.contains(&k) {
            let e = if diverged {
                f64::INFINITY
            } else {
                let target = &traj.positions[origin + k];
                state
                    .positions
                    .iter()
                    .zip(target)
                    .map(|(p, z)| (p - z) * (p - z))
                    .sum()
            };
            out.push((k, e));
        }
    }
    Ok(out)
}

/// Score ties closer than this (relative to the best score, floored
/// absolutely) fall through to the arity/order tie-break. Exact-fit
/// residuals land many orders below it; genuinely wrong families land
/// above it for O(1)-amplitude data.
const SELECT_TIE_TOL: f64 = 1e-9;

/// Selection scoring residual: like [`ode_residual`] but stepping with RK4
/// so the floor is set by model mismatch rather than by the integrator
/// order of the candidate (first-order families would otherwise pay an
/// O(Δt²) forward-Euler penalty that second-order candidates do not).
fn scoring_residual(
    traj: &Trajectory,
    family: &OdeFamily,
    params: &ParamVector,
) -> Result<f64> {
    let kind = IntegratorKind::Rk4;
    let second = family.tag.is_second_order();
    let t_first = 1; // central differences need a left neighbor either way
    if traj.len() < t_first + 2 {
        return Err(Error::TooShort {
            needed: t_first + 2,
            got: traj.len(),
        });
    }
    let scheme = velocity_scheme_for(kind);
    let mut sum = 0.0;
    let mut count = 0usize;
    for t in t_first..traj.len() - 1 {
        let state = traj.state_at(t, scheme, second);
        let pred = step(kind, family, params, &state, traj.dt)?;
        if !pred.is_finite() {
            return Ok(f64::INFINITY);
        }
        for b in 0..traj.body_count() {
            let e = pred.positions[b] - traj.positions[t + 1][b];
            sum += e * e;
        }
        count += 1;
    }
    Ok(sum / count as f64)
}

/// Residual-based equation-family selection.
///
/// Each candidate is fitted — by direct least squares where supported,
/// otherwise by a short 50-epoch refinement seeded from a derivative
/// regression — and scored by its physics residual. The argmin wins; ties
/// break toward fewer parameters, then toward the earlier candidate.
pub fn select_family(
    traj: &Trajectory,
    candidates: &[OdeFamily],
) -> Result<(OdeFamily, Vec<f64>)> {
    if candidates.is_empty() {
        return Err(Error::Domain("no candidate families".into()));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for family in candidates {
        scores.push(candidate_score(traj, family).unwrap_or(f64::INFINITY));
    }
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::IllPosed("all candidate families ill-posed".into()));
    }
    let tol = SELECT_TIE_TOL * best.max(1.0);
    let mut chosen = 0;
    let mut chosen_tied = false;
    for (i, &s) in scores.iter().enumerate() {
        let tied = s - best <= tol;
        if !chosen_tied && tied {
            chosen = i;
            chosen_tied = true;
        } else if tied && candidates[i].arity() < candidates[chosen].arity() {
            chosen = i;
        }
    }
    Ok((candidates[chosen].clone(), scores))
}

fn candidate_score(traj: &Trajectory, family: &OdeFamily) -> Result<f64> {
    if traj.body_count() != family.body_count {
        return Ok(f64::INFINITY);
    }
    match family.tag {
        FamilyTag::SecondOrderLinear
        | FamilyTag::FirstOrderDecay
        | FamilyTag::ConstantAccel => {
            let params = direct_ls_fit(family, traj)?;
            ode_residual(traj, family, &params, traj.dt)
        }
        FamilyTag::FallingBallRadius => {
            // No stepper exists for the algebraic model; score it by its
            // closed-form fit residual.
            let params = direct_ls_fit(family, traj)?;
            closed_form_mse(family, &params, traj)
        }
        _ => {
            let init = warm_init(traj, family).unwrap_or_else(|| default_init(family));
            let mut config = FitConfig::one_step(family);
            config.epochs = 50;
            config.init_params = init;
            let fit = fit_clip(
                family,
                traj,
                &config,
                ClipId::new("select", family.tag.as_str(), 0, config.seed),
            )?;
            if fit.diverged {
                return Ok(f64::INFINITY);
            }
            ode_residual(traj, family, &fit.final_params, traj.dt)
        }
    }
}

/// Seed nonlinear candidates by regressing finite-difference accelerations
/// on the family's basis functions (everything in the bank is linear in its
/// parameters, so this lands near the optimum and the 50-epoch refinement
/// only has to polish).
fn warm_init(traj: &Trajectory, family: &OdeFamily) -> Option<ParamVector> {
    let n = family.body_count;
    let p = family.arity();
    if traj.len() < 5 {
        return None;
    }
    let mut rows = Vec::new();
    let mut target = Vec::new();
    match family.tag {
        FamilyTag::NonlinearPendulum => {
            for t in 1..traj.len() - 1 {
                rows.push(vec![
                    -traj.positions[t][0].sin(),
                    -traj.velocity_central(t, 0),
                ]);
                target.push(traj.accel_central(t, 0));
            }
        }
        FamilyTag::Torricelli => {
            for t in 1..traj.len() - 1 {
                rows.push(vec![-traj.positions[t][0].max(0.0).sqrt()]);
                target.push(traj.velocity_central(t, 0));
            }
        }
        FamilyTag::CoupledPendulum => {
            for t in 1..traj.len() - 1 {
                for i in 0..n {
                    let mut row = vec![0.0; p];
                    row[i] = -traj.positions[t][i].sin();
                    row[n + i] = -traj.velocity_central(t, i);
                    for j in 0..n {
                        if j != i {
                            row[family.kappa_index(i, j)] =
                                -(traj.positions[t][i] - traj.positions[t][j]);
                        }
                    }
                    rows.push(row);
                    target.push(traj.accel_central(t, i));
                }
            }
        }
        FamilyTag::CoupledContact => {
            for t in 1..traj.len() - 1 {
                for i in 0..n {
                    let coupling: f64 = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| traj.positions[t][i] - traj.positions[t][j])
                        .sum();
                    rows.push(vec![-coupling, -traj.velocity_central(t, i)]);
                    target.push(traj.accel_central(t, i));
                }
            }
        }
        _ => return None,
    }
    let x = lstsq(&Mat::from_rows(&rows), &target).ok()?;
    ParamVector::new(family.clone(), x)
        .or_else(|_| {
            // Clamp onto the feasible set rather than discarding the seed.
            let mut v = default_init(family);
            v.project_feasible();
            Ok::<_, Error>(v)
        })
        .ok()
}

/// Confusion matrix over equation families (rows = ground truth,
/// columns = predicted).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    /// Build with an explicit label order; unknown labels are an error.
    pub fn with_labels(labels: &[String], gt: &[String], predicted: &[String]) -> Result<Self> {
        if gt.len() != predicted.len() {
            return Err(Error::Domain(format!(
                "label list length mismatch: {} vs {}",
                gt.len(),
                predicted.len()
            )));
        }
        let index = |l: &String| -> Result<usize> {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::Domain(format!("unknown label `{l}`")))
        };
        let mut counts = vec![vec![0usize; labels.len()]; labels.len()];
        for (g, p) in gt.iter().zip(predicted) {
            counts[index(g)?][index(p)?] += 1;
        }
        Ok(Self {
            labels: labels.to_vec(),
            counts,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn overall_accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.trace() as f64 / total as f64
        }
    }

    /// Per-class accuracy; `None` for classes with no ground-truth rows.
    pub fn per_class_accuracy(&self) -> Vec<Option<f64>> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let total: usize = row.iter().sum();
                (total > 0).then(|| self.counts[i][i] as f64 / total as f64)
            })
            .collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .labels
            .iter()
            .map(|l| l.len())
            .max()
            .unwrap_or(8)
            .max(6);
        out.push_str(&format!("{:width$} ", "gt\\pred"));
        for l in &self.labels {
            out.push_str(&format!("{l:>width$} "));
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("{l:width$} "));
            for c in &self.counts[i] {
                out.push_str(&format!("{c:>width$} "));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "accuracy: {}/{} = {:.1}%\n",
            self.trace(),
            self.total(),
            100.0 * self.overall_accuracy()
        ));
        out
    }
}

/// Build a confusion matrix with labels inferred as the sorted union of
/// both lists.
pub fn confusion(gt: &[String], predicted: &[String]) -> Result<ConfusionMatrix> {
    if gt.len() != predicted.len() {
        return Err(Error::Domain(format!(
            "label list length mismatch: {} vs {}",
            gt.len(),
            predicted.len()
        )));
    }
    let mut labels: Vec<String> = gt.iter().chain(predicted).cloned().collect();
    labels.sort();
    labels.dedup();
    ConfusionMatrix::with_labels(&labels, gt, predicted)
}

// ---------------------------------------------------------------------------
// Report aggregation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub phenomenon: String,
    pub setting: String,
    pub param_name: String,
    pub gt: Option<f64>,
    pub mae: Option<f64>,
    pub sigma: f64,
    pub n_clips: usize,
}

/// Gradient-norm snapshots at the reporting epochs 1, 50, 200.
pub const SNAPSHOT_EPOCHS: [usize; 3] = [1, 50, 200];

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
    /// Mean converged physics residual per "phenomenon/setting".
    pub residual_by_setting: BTreeMap<String, f64>,
    /// Mean gradient norms at epochs 1/50/200 per "phenomenon/setting"
    /// (present only when per-epoch diagnostics were recorded).
    pub grad_norm_snapshots: BTreeMap<String, Vec<Option<f64>>>,
    /// Per-setting extrapolation: (k, mean Eₖ, std Eₖ).
    pub extrapolation: BTreeMap<String, Vec<(usize, f64, f64)>>,
    /// Clips whose fit tripped the divergence guard.
    pub diverged_clips: Vec<String>,
}

fn setting_key(phenomenon: &str, setting: &str) -> String {
    format!("{phenomenon}/{setting}")
}

/// Aggregate results rows into the per-(phenomenon, setting, parameter)
/// accuracy table plus residual bookkeeping. A pure fold over the rows:
/// every number in the report is recomputable from them.
pub fn aggregate(rows: &[ResultsRow]) -> Result<EvalReport> {
    let mut by_param: BTreeMap<(String, String, String), Vec<&ResultsRow>> = BTreeMap::new();
    let mut residuals: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut seen_clip: BTreeMap<(String, String, usize), bool> = BTreeMap::new();
    let mut diverged: Vec<String> = Vec::new();
    for row in rows {
        by_param
            .entry((
                row.phenomenon.clone(),
                row.setting.clone(),
                row.param_name.clone(),
            ))
            .or_default()
            .push(row);
        let clip_key = (row.phenomenon.clone(), row.setting.clone(), row.clip);
        if seen_clip.insert(clip_key, true).is_none() {
            residuals
                .entry(setting_key(&row.phenomenon, &row.setting))
                .or_default()
                .push(row.ode_residual);
            if row.diverged {
                diverged.push(format!(
                    "{}/{}/clip{}",
                    row.phenomenon, row.setting, row.clip
                ));
            }
        }
    }
    let mut report_rows = Vec::new();
    for ((phenomenon, setting, param_name), group) in by_param {
        let estimates: Vec<f64> = group.iter().map(|r| r.estimate).collect();
        let gt = group.iter().find_map(|r| r.gt);
        let summary = match gt {
            Some(g) => Some(mae(&estimates, g)?),
            None => None,
        };
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let sigma = if estimates.len() > 1 {
            (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>()
                / (estimates.len() - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        report_rows.push(ReportRow {
            phenomenon,
            setting,
            param_name,
            gt,
            mae: summary.map(|s| s.mae),
            sigma,
            n_clips: estimates.len(),
        });
    }
    let residual_by_setting = residuals
        .into_iter()
        .map(|(k, v)| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            (k, mean)
        })
        .collect();
    Ok(EvalReport {
        rows: report_rows,
        residual_by_setting,
        grad_norm_snapshots: BTreeMap::new(),
        extrapolation: BTreeMap::new(),
        diverged_clips: diverged,
    })
}

impl EvalReport {
    /// Fill the gradient-norm snapshot table from per-epoch diagnostics
    /// (setting key → per-clip grad-norm curves).
    pub fn with_grad_snapshots(mut self, curves: &BTreeMap<String, Vec<Vec<f64>>>) -> Self {
        for (key, clip_curves) in curves {
            let mut cells: Vec<Option<f64>> = Vec::new();
            for &epoch in &SNAPSHOT_EPOCHS {
                let vals: Vec<f64> = clip_curves
                    .iter()
                    .filter_map(|c| c.get(epoch - 1).copied())
                    .collect();
                cells.push(if vals.is_empty() {
                    None
                } else {
                    Some(vals.iter().sum::<f64>() / vals.len() as f64)
                });
            }
            self.grad_norm_snapshots.insert(key.clone(), cells);
        }
        self
    }

    /// Fill the extrapolation table from per-clip (k, Eₖ) lists.
    pub fn with_extrapolation(
        mut self,
        per_clip: &BTreeMap<String, Vec<Vec<(usize, f64)>>>,
    ) -> Self {
        for (key, clips) in per_clip {
            let mut by_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for clip in clips {
                for &(k, e) in clip {
                    by_k.entry(k).or_default().push(e);
                }
            }
            let series = by_k
                .into_iter()
                .map(|(k, es)| {
                    let n = es.len() as f64;
                    let mean = es.iter().sum::<f64>() / n;
                    let std = if es.len() > 1 {
                        (es.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                    } else {
                        0.0
                    };
                    (k, mean, std)
                })
                .collect();
            self.extrapolation.insert(key.clone(), series);
        }
        self
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<22} {:<20} {:<12} {:>12} {:>12} {:>12} {:>8}\n",
            "phenomenon", "setting", "param", "gt", "mae", "sigma", "clips"
        ));
        for r in &self.rows {
            let fmt_opt = |v: Option<f64>| match v {
                Some(x) => format!("{x:.6}"),
                None => "-".to_string(),
            };
            out.push_str(&format!(
                "{:<22} {:<20} {:<12} {:>12} {:>12} {:>12.6} {:>8}\n",
                r.phenomenon,
                r.setting,
                r.param_name,
                fmt_opt(r.gt),
                fmt_opt(r.mae),
                r.sigma,
                r.n_clips
            ));
        }
        if !self.residual_by_setting.is_empty() {
            out.push_str("\nphysics residual by setting:\n");
            for (k, v) in &self.residual_by_setting {
                out.push_str(&format!("  {k:<40} {v:.3e}\n"));
            }
        }
        if !self.grad_norm_snapshots.is_empty() {
            out.push_str("\ngradient norms at epochs 1/50/200:\n");
            for (k, cells) in &self.grad_norm_snapshots {
                let cell = |c: &Option<f64>| match c {
                    Some(v) => format!("{v:.3e}"),
                    None => "-".to_string(),
                };
                out.push_str(&format!(
                    "  {k:<40} {} / {} / {}\n",
                    cell(&cells[0]),
                    cell(&cells[1]),
                    cell(&cells[2])
                ));
            }
        }
        if !self.extrapolation.is_empty() {
            out.push_str("\nextrapolation error by horizon:\n");
            for (key, series) in &self.extrapolation {
                for (k, mean, std) in series {
                    out.push_str(&format!("  {key:<40} k={k:<4} {mean:.4e} +- {std:.4e}\n"));
                }
            }
        }
        if !self.diverged_clips.is_empty() {
            out.push_str("\ndiverged clips:\n");
            for c in &self.diverged_clips {
                out.push_str(&format!("  {c}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::rollout;
    use crate::ode::StateVector;

    #[test]
    fn mae_single_estimate() {
        let s = mae(&[9.81], 9.81).unwrap();
        assert_eq!(s.mae, 0.0);
        assert_eq!(s.sigma, 0.0);
    }

    #[test]
    fn mae_paper_cross_consistency() {
        // App. H mean estimate 8.77 vs GT 9.81 gives the Table S5 MAE 1.04.
        let s = mae(&[8.77], 9.81).unwrap();
        assert!((s.mae - 1.04).abs() < 1e-12);
    }

    #[test]
    fn mae_hand_arithmetic() {
        let s = mae(&[1.0, 2.0, 3.0], 2.0).unwrap();
        assert!((s.mae - 2.0 / 3.0).abs() < 1e-15);
        assert!(mae(&[], 1.0).is_err());
    }

    #[test]
    fn residual_zero_for_self_generated_first_order() {
        // Forward-Euler-generated decay is predicted exactly by the same
        // stepper: the residual is numerically zero.
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let p = ParamVector::new(fam.clone(), vec![0.8]).unwrap();
        let init = StateVector::first_order(vec![1.0]);
        let r = rollout(IntegratorKind::EulerCorrected, &fam, &p, &init, 0.05, 100).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let res = ode_residual(&traj, &fam, &p, traj.dt).unwrap();
        assert!(res <= 1e-20, "residual = {res}");
    }

    #[test]
    fn residual_zero_for_constant_zero_dynamics() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = ParamVector::new(fam.clone(), vec![0.0, 0.0]).unwrap();
        let traj = Trajectory::new(0.1, 0.0, vec![vec![0.7]; 40]).unwrap();
        assert_eq!(ode_residual(&traj, &fam, &p, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn extrapolation_zero_at_exact_params() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let p = ParamVector::new(fam.clone(), vec![1.0, 0.0]).unwrap();
        let init = StateVector::second_order(vec![1.0], vec![0.0]);
        let r = rollout(IntegratorKind::EulerCorrected, &fam, &p, &init, 0.01, 200).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let es = extrapolation_error(
            &traj,
            &fam,
            &p,
            IntegratorKind::EulerCorrected,
            100,
            &[10, 25, 50],
        )
        .unwrap();
        for (_, e) in es {
            assert!(e < 1e-18, "E_k = {e}");
        }
    }

    #[test]
    fn extrapolation_grows_with_horizon_under_mismatch() {
        let fam = OdeFamily::single(FamilyTag::SecondOrderLinear);
        let truth = ParamVector::new(fam.clone(), vec![1.0, 0.0]).unwrap();
        let off = ParamVector::new(fam.clone(), vec![1.1, 0.0]).unwrap();
        let init = StateVector::second_order(vec![1.0], vec![0.0]);
        let r = rollout(IntegratorKind::Rk4, &fam, &truth, &init, 0.01, 200).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let es = extrapolation_error(
            &traj,
            &fam,
            &off,
            IntegratorKind::Rk4,
            100,
            &[10, 25, 50],
        )
        .unwrap();
        assert!(es[0].1 < es[1].1 && es[1].1 < es[2].1, "{es:?}");
    }

    #[test]
    fn confusion_perfect_and_degenerate() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let perfect = confusion(&labels, &labels).unwrap();
        assert_eq!(perfect.overall_accuracy(), 1.0);
        assert_eq!(perfect.trace(), 3);

        // Single-class predictor over 6 balanced classes: accuracy 1/6.
        let gt: Vec<String> = (0..6)
            .flat_map(|c| std::iter::repeat(format!("c{c}")).take(15))
            .collect();
        let pred: Vec<String> = std::iter::repeat("c0".to_string()).take(90).collect();
        let m = confusion(&gt, &pred).unwrap();
        assert!((m.overall_accuracy() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn confusion_errors() {
        let a = vec!["x".to_string()];
        let b: Vec<String> = vec![];
        assert!(confusion(&a, &b).is_err());
        let labels = vec!["x".to_string()];
        assert!(ConfusionMatrix::with_labels(&labels, &a, &["y".to_string()]).is_err());
    }

    #[test]
    fn single_candidate_is_chosen_trivially() {
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let p = ParamVector::new(fam.clone(), vec![1.0]).unwrap();
        let init = StateVector::first_order(vec![1.0]);
        let r = rollout(IntegratorKind::Rk4, &fam, &p, &init, 0.02, 100).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let (chosen, scores) = select_family(&traj, &[fam.clone()]).unwrap();
        assert_eq!(chosen.tag, FamilyTag::FirstOrderDecay);
        assert_eq!(scores.len(), 1);
    }

    #[test]
    fn decay_clip_beats_linear_oscillator_by_tie_break() {
        let fam = OdeFamily::single(FamilyTag::FirstOrderDecay);
        let p = ParamVector::new(fam.clone(), vec![2.3]).unwrap();
        let init = StateVector::first_order(vec![1.0]);
        let r = rollout(IntegratorKind::Rk4, &fam, &p, &init, 0.01, 300).unwrap();
        let traj = Trajectory::from_rollout(&r);
        let candidates = vec![
            OdeFamily::single(FamilyTag::SecondOrderLinear),
            OdeFamily::single(FamilyTag::FirstOrderDecay),
            OdeFamily::single(FamilyTag::ConstantAccel),
        ];
        let (chosen, _) = select_family(&traj, &candidates).unwrap();
        assert_eq!(chosen.tag, FamilyTag::FirstOrderDecay);
    }

    #[test]
    fn parabola_clip_selects_constant_accel() {
        let positions: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.01;
                vec![0.5 * 2.5 * t * t]
            })
            .collect();
        let traj = Trajectory::new(0.01, 0.0, positions).unwrap();
        let candidates = vec![
            OdeFamily::single(FamilyTag::FirstOrderDecay),
            OdeFamily::single(FamilyTag::ConstantAccel),
        ];
        let (chosen, _) = select_family(&traj, &candidates).unwrap();
        assert_eq!(chosen.tag, FamilyTag::ConstantAccel);
    }

    #[test]
    fn aggregate_is_pure_fold_over_rows() {
        let row = |clip: usize, param: &str, est: f64| ResultsRow {
            phenomenon: "pendulum".into(),
            setting: "pend_45".into(),
            clip,
            seed: 42,
            family: "nonlinear_pendulum".into(),
            integrator: "euler".into(),
            loss_kind: "one-step".into(),
            horizon: 1,
            param_name: param.into(),
            gt: Some(0.5),
            estimate: est,
            ode_residual: 1e-4,
            diverged: false,
        };
        let rows = vec![row(8, "L", 0.52), row(9, "L", 0.46)];
        let report = aggregate(&rows).unwrap();
        assert_eq!(report.rows.len(), 1);
        let r = &report.rows[0];
        assert_eq!(r.n_clips, 2);
        // Brute-force recomputation: mean(|0.52-0.5|, |0.46-0.5|) = 0.03.
        assert!((r.mae.unwrap() - 0.03).abs() < 1e-12);
        assert!((report.residual_by_setting["pendulum/pend_45"] - 1e-4).abs() < 1e-18);
    }
}
