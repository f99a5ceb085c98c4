//! File formats: trajectory CSV, `parameters.json`, split manifests, and
//! the results/diagnostics CSV schemas.
//!
//! Determinism contract: every writer produces byte-identical output for
//! identical inputs. Trajectory CSVs use Rust's shortest-exact float
//! formatting so a written file loads back bit-identically; aggregate
//! outputs (results, reports) round to 9 significant digits. All writes go
//! through [`atomic_write`] (write-then-rename), so an interrupted run
//! never leaves a truncated file behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::{assign_splits, SplitLabel};
use crate::trajectory::Trajectory;

/// Format a float with 9 significant digits (aggregate outputs).
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.8e}")
}

/// Write `contents` to `path` atomically: write a sibling temp file, then
/// rename over the target.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// parameters.json
// ---------------------------------------------------------------------------

/// One ground-truth parameter entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    pub measurement_type: String,
    /// Unknown fields are preserved for round-tripping.
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// Ground truth for one (phenomenon, setting).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRecord {
    pub phenomenon: String,
    pub setting: String,
    pub params: Vec<ParamRecord>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl GroundTruthRecord {
    fn validate(&self) -> Result<()> {
        let ctx = format!("{}/{}", self.phenomenon, self.setting);
        if self.phenomenon.is_empty() || self.setting.is_empty() {
            return Err(Error::Schema {
                context: ctx,
                msg: "phenomenon and setting must be non-empty".into(),
            });
        }
        for p in &self.params {
            if p.measurement_type != "direct" && p.measurement_type != "fitted" {
                return Err(Error::Schema {
                    context: format!("{ctx} param {}", p.name),
                    msg: format!(
                        "measurement_type must be \"direct\" or \"fitted\", got {:?}",
                        p.measurement_type
                    ),
                });
            }
            if let Some(s) = p.std {
                if s < 0.0 {
                    return Err(Error::Schema {
                        context: format!("{ctx} param {}", p.name),
                        msg: "std must be >= 0".into(),
                    });
                }
            }
            if let (Some(lo), Some(hi)) = (p.min, p.max) {
                if !(lo <= p.value && p.value <= hi) {
                    return Err(Error::Schema {
                        context: format!("{ctx} param {}", p.name),
                        msg: format!("value {} outside bounds [{lo}, {hi}]", p.value),
                    });
                }
            }
        }
        Ok(())
    }

    /// Look up a parameter value by name.
    pub fn value_of(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

pub fn load_parameters_json(path: &Path) -> Result<Vec<GroundTruthRecord>> {
    let text = std::fs::read_to_string(path)?;
    let records: Vec<GroundTruthRecord> =
        serde_json::from_str(&text).map_err(|e| Error::Schema {
            context: path.display().to_string(),
            msg: e.to_string(),
        })?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

pub fn save_parameters_json(path: &Path, records: &[GroundTruthRecord]) -> Result<()> {
    for r in records {
        r.validate()?;
    }
    let mut text = serde_json::to_string_pretty(records)?;
    text.push('\n');
    atomic_write(path, &text)
}

// ---------------------------------------------------------------------------
// Trajectory CSV (header: t,body,pos)
// ---------------------------------------------------------------------------

pub fn save_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::with_capacity(traj.len() * traj.body_count() * 24);
    out.push_str("t,body,pos\n");
    for i in 0..traj.len() {
        let t = traj.time(i);
        for (body, z) in traj.positions[i].iter().enumerate() {
            // Shortest-exact formatting: the file loads back bit-identically.
            writeln!(out, "{t},{body},{z}").expect("string write");
        }
    }
    atomic_write(path, &out)
}

pub fn load_trajectory_csv(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)?;
    let pstr = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "t,body,pos")) => {}
        other => {
            return Err(Error::Parse {
                path: pstr,
                line: 1,
                msg: format!("expected header `t,body,pos`, got {:?}", other.map(|(_, l)| l)),
            })
        }
    }
    let mut times: Vec<f64> = Vec::new();
    let mut positions: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut fields = line.split(',');
        let (t, body, pos) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(b), Some(p), None) => {
                let parse = |s: &str, what: &str| -> Result<f64> {
                    s.parse().map_err(|_| Error::Parse {
                        path: pstr.clone(),
                        line: lineno,
                        msg: format!("bad {what} `{s}`"),
                    })
                };
                let body: usize = b.parse().map_err(|_| Error::Parse {
                    path: pstr.clone(),
                    line: lineno,
                    msg: format!("bad body index `{b}`"),
                })?;
                (parse(t, "time")?, body, parse(p, "position")?)
            }
            _ => {
                return Err(Error::Parse {
                    path: pstr,
                    line: lineno,
                    msg: "expected 3 comma-separated fields".into(),
                })
            }
        };
        let new_sample = times.last().map_or(true, |&last| t != last);
        if new_sample {
            if let Some(&last) = times.last() {
                if t < last {
                    return Err(Error::Parse {
                        path: pstr,
                        line: lineno,
                        msg: "rows must be sorted by (t, body)".into(),
                    });
                }
            }
            times.push(t);
            positions.push(Vec::new());
        }
        let row = positions.last_mut().unwrap();
        if body != row.len() {
            return Err(Error::Parse {
                path: pstr,
                line: lineno,
                msg: format!("expected body {} at t = {t}, got {body}", row.len()),
            });
        }
        row.push(pos);
    }
    if times.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: times.len(),
        });
    }
    let bodies = positions[0].len();
    if let Some(i) = positions.iter().position(|row| row.len() != bodies) {
        return Err(Error::Parse {
            path: pstr,
            line: 0,
            msg: format!(
                "missing bodies at t = {}: expected {bodies}, got {}",
                times[i],
                positions[i].len()
            ),
        });
    }
    let dt = times[1] - times[0];
    let tol = 1e-9 * dt.abs().max(1e-300);
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > tol {
            return Err(Error::Parse {
                path: pstr,
                line: 0,
                msg: format!(
                    "non-uniform timestep: {} vs {} (tolerance {:.1e})",
                    w[1] - w[0],
                    dt,
                    tol
                ),
            });
        }
    }
    Trajectory::new(dt, times[0], positions)
}

// ---------------------------------------------------------------------------
// Split manifest CSV (header: phenomenon,setting,trial,split)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub phenomenon: String,
    pub setting: String,
    pub trial: usize,
    pub split: SplitLabel,
}

/// Deterministic split manifest over a list of (phenomenon, setting,
/// trial_count) entries. Settings with 10 trials get the canonical 7/1/2
/// assignment; any other trial count requires an explicit
/// (train, val, test) override summing to it.
pub fn split_manifest(
    settings: &[(String, String, usize)],
    seed: u64,
    ratio_override: Option<(usize, usize, usize)>,
) -> Result<Vec<ManifestRow>> {
    let mut rows = Vec::new();
    for (phenomenon, setting, trials) in settings {
        let labels = if *trials == 10 {
            assign_splits(seed, phenomenon, setting, 10)
        } else {
            match ratio_override {
                Some((tr, va, te)) if tr + va + te == *trials => {
                    crate::synth::assign_splits_with_counts(seed, phenomenon, setting, tr, va, te)
                }
                Some((tr, va, te)) => {
                    return Err(Error::Domain(format!(
                        "override {tr}/{va}/{te} does not sum to {trials} trials for {phenomenon}/{setting}"
                    )))
                }
                None => {
                    return Err(Error::Domain(format!(
                        "{phenomenon}/{setting} has {trials} trials; a split ratio override is required"
                    )))
                }
            }
        };
        for (trial, label) in labels.iter().enumerate() {
            rows.push(ManifestRow {
                phenomenon: phenomenon.clone(),
                setting: setting.clone(),
                trial,
                split: *label,
            });
        }
    }
    Ok(rows)
}

pub fn save_manifest_csv(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut out = String::from("phenomenon,setting,trial,split\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.phenomenon,
            r.setting,
            r.trial,
            r.split.as_str()
        )
        .expect("string write");
    }
    atomic_write(path, &out)
}

pub fn load_manifest_csv(path: &Path) -> Result<Vec<ManifestRow>> {
    let text = std::fs::read_to_string(path)?;
    let pstr = path.display().to_string();
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != "phenomenon,setting,trial,split" {
                return Err(Error::Parse {
                    path: pstr,
                    line: 1,
                    msg: "bad manifest header".into(),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                path: pstr,
                line: idx + 1,
                msg: "expected 4 fields".into(),
            });
        }
        rows.push(ManifestRow {
            phenomenon: fields[0].to_string(),
            setting: fields[1].to_string(),
            trial: fields[2].parse().map_err(|_| Error::Parse {
                path: pstr.clone(),
                line: idx + 1,
                msg: format!("bad trial index `{}`", fields[2]),
            })?,
            split: fields[3].parse()?,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Results CSV
// ---------------------------------------------------------------------------

pub const RESULTS_HEADER: &str = "phenomenon,setting,clip,seed,family,integrator,loss_kind,horizon,param_name,gt,estimate,abs_error,ode_residual,diverged";

/// One estimated parameter of one clip fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsRow {
    pub phenomenon: String,
    pub setting: String,
    pub clip: usize,
    pub seed: u64,
    pub family: String,
    pub integrator: String,
    pub loss_kind: String,
    pub horizon: usize,
    pub param_name: String,
    pub gt: Option<f64>,
    pub estimate: f64,
    pub ode_residual: f64,
    pub diverged: bool,
}

impl ResultsRow {
    /// |estimate − gt| when ground truth is present.
    pub fn abs_error(&self) -> Option<f64> {
        self.gt.map(|g| (self.estimate - g).abs())
    }

    /// Sort key: the traceability tuple plus the parameter name.
    pub fn sort_key(&self) -> (String, String, usize, u64, String) {
        (
            self.phenomenon.clone(),
            self.setting.clone(),
            self.clip,
            self.seed,
            self.param_name.clone(),
        )
    }
}

pub fn results_to_csv(rows: &[ResultsRow]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        let gt = r.gt.map(fmt_g9).unwrap_or_default();
        let abs = r.abs_error().map(fmt_g9).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.phenomenon,
            r.setting,
            r.clip,
            r.seed,
            r.family,
            r.integrator,
            r.loss_kind,
            r.horizon,
            r.param_name,
            gt,
            fmt_g9(r.estimate),
            abs,
            fmt_g9(r.ode_residual),
            r.diverged
        )
        .expect("string write");
    }
    out
}

pub fn save_results_csv(path: &Path, rows: &[ResultsRow]) -> Result<()> {
    atomic_write(path, &results_to_csv(rows))
}

pub fn load_results_csv(path: &Path) -> Result<Vec<ResultsRow>> {
    let text = std::fs::read_to_string(path)?;
    let pstr = path.display().to_string();
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != RESULTS_HEADER {
                return Err(Error::Parse {
                    path: pstr,
                    line: 1,
                    msg: "bad results header".into(),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(Error::Parse {
                path: pstr,
                line: idx + 1,
                msg: format!("expected 14 fields, got {}", f.len()),
            });
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                path: pstr.clone(),
                line: idx + 1,
                msg: format!("bad float `{s}`"),
            })
        };
        let gt = if f[9].is_empty() {
            None
        } else {
            Some(parse_f64(f[9])?)
        };
        rows.push(ResultsRow {
            phenomenon: f[0].to_string(),
            setting: f[1].to_string(),
            clip: f[2].parse().map_err(|_| Error::Parse {
                path: pstr.clone(),
                line: idx + 1,
                msg: format!("bad clip `{}`", f[2]),
            })?,
            seed: f[3].parse().map_err(|_| Error::Parse {
                path: pstr.clone(),
                line: idx + 1,
                msg: format!("bad seed `{}`", f[3]),
            })?,
            family: f[4].to_string(),
            integrator: f[5].to_string(),
            loss_kind: f[6].to_string(),
            horizon: f[7].parse().map_err(|_| Error::Parse {
                path: pstr.clone(),
                line: idx + 1,
                msg: format!("bad horizon `{}`", f[7]),
            })?,
            param_name: f[8].to_string(),
            gt,
            estimate: parse_f64(f[10])?,
            ode_residual: parse_f64(f[12])?,
            diverged: f[13] == "true",
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn record() -> GroundTruthRecord {
        GroundTruthRecord {
            phenomenon: "pendulum".into(),
            setting: "pend_45".into(),
            params: vec![ParamRecord {
                name: "zeta".into(),
                value: 0.02,
                std: Some(0.005),
                min: None,
                max: None,
                units: Some("1/s".into()),
                measurement_type: "fitted".into(),
                extra: Default::default(),
            }],
            extra: Default::default(),
        }
    }

    #[test]
    fn parameters_json_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("parameters.json");
        let records = vec![record()];
        save_parameters_json(&path, &records).unwrap();
        let loaded = load_parameters_json(&path).unwrap();
        assert_eq!(records, loaded);
        // Save → load → save is byte-stable.
        let first = std::fs::read_to_string(&path).unwrap();
        save_parameters_json(&path, &loaded).unwrap();
        assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    }

    #[test]
    fn missing_measurement_type_is_rejected_by_name() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("parameters.json");
        std::fs::write(
            &path,
            r#"[{"phenomenon":"led","setting":"led_2s","params":[{"name":"gamma","value":2.3}]}]"#,
        )
        .unwrap();
        let err = load_parameters_json(&path).unwrap_err().to_string();
        assert!(err.contains("measurement_type"), "got: {err}");
    }

    #[test]
    fn unknown_fields_survive_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("parameters.json");
        std::fs::write(
            &path,
            r#"[{"phenomenon":"led","setting":"led_2s","camera":"side",
                 "params":[{"name":"gamma","value":2.3,"measurement_type":"fitted","note":"x"}]}]"#,
        )
        .unwrap();
        let loaded = load_parameters_json(&path).unwrap();
        assert_eq!(
            loaded[0].extra.get("camera"),
            Some(&serde_json::Value::String("side".into()))
        );
        assert_eq!(
            loaded[0].params[0].extra.get("note"),
            Some(&serde_json::Value::String("x".into()))
        );
    }

    #[test]
    fn trajectory_csv_bit_exact_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("clip.csv");
        let traj = Trajectory::new(
            1.0 / 60.0,
            0.0,
            (0..40)
                .map(|i| vec![(i as f64 * 0.1).sin(), (i as f64 * 0.07).cos()])
                .collect(),
        )
        .unwrap();
        save_trajectory_csv(&path, &traj).unwrap();
        let loaded = load_trajectory_csv(&path).unwrap();
        assert_eq!(loaded.dt, traj.dt);
        assert_eq!(loaded.positions, traj.positions);
        assert_eq!(loaded.body_count(), 2);
    }

    #[test]
    fn jittered_timestamps_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("clip.csv");
        std::fs::write(&path, "t,body,pos\n0.0,0,1.0\n0.1,0,1.0\n0.21,0,1.0\n").unwrap();
        assert!(load_trajectory_csv(&path).is_err());
    }

    #[test]
    fn missing_body_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("clip.csv");
        std::fs::write(
            &path,
            "t,body,pos\n0.0,0,1.0\n0.0,1,2.0\n0.1,0,1.0\n0.2,0,1.0\n0.2,1,2.0\n",
        )
        .unwrap();
        assert!(load_trajectory_csv(&path).is_err());
    }

    #[test]
    fn manifest_deterministic_and_7_1_2() {
        let settings = vec![("pendulum".to_string(), "pend_45".to_string(), 10)];
        let a = split_manifest(&settings, 42, None).unwrap();
        let b = split_manifest(&settings, 42, None).unwrap();
        assert_eq!(a, b);
        let count = |l: SplitLabel| a.iter().filter(|r| r.split == l).count();
        assert_eq!(count(SplitLabel::Train), 7);
        assert_eq!(count(SplitLabel::Val), 1);
        assert_eq!(count(SplitLabel::Test), 2);
    }

    #[test]
    fn manifest_override_for_five_trials() {
        let settings = vec![("led".to_string(), "led_2s".to_string(), 5)];
        assert!(split_manifest(&settings, 42, None).is_err());
        let rows = split_manifest(&settings, 42, Some((3, 1, 1))).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(split_manifest(&settings, 42, Some((3, 1, 2))).is_err());
    }

    #[test]
    fn results_csv_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let rows = vec![ResultsRow {
            phenomenon: "pendulum".into(),
            setting: "pend_45".into(),
            clip: 8,
            seed: 42,
            family: "nonlinear_pendulum".into(),
            integrator: "euler".into(),
            loss_kind: "one-step".into(),
            horizon: 1,
            param_name: "L".into(),
            gt: Some(0.5),
            estimate: 0.512345678901,
            ode_residual: 1.25e-6,
            diverged: false,
        }];
        save_results_csv(&path, &rows).unwrap();
        let loaded = load_results_csv(&path).unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded[0].phenomenon, "pendulum");
        // 9 significant digits survive.
        assert!((loaded[0].estimate - 0.512345679).abs() < 1e-9);
        assert_eq!(loaded[0].gt, Some(0.5));
        let err = loaded[0].abs_error().unwrap();
        assert!((err - 0.012345679).abs() < 1e-9);
    }

    #[test]
    fn fmt_g9_examples() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(9.81), "9.81000000e0");
        assert_eq!(fmt_g9(-1.0 / 3.0), "-3.33333333e-1");
    }
}
