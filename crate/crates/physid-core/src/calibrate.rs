//! Conversion of fitted ODE-bank coefficients into SI physical parameters,
//! per phenomenon.
//!
//! The shipped defaults encode the per-phenomenon conversion table:
//! free-fall g is read off the stiffness coefficient, pendulum length is
//! L = g_true/α_fit (with g_true = 9.81 m/s² fixed) or recovered from the
//! extracted period as L = g·(T/2π)², friction comes from the incline
//! inversion μ = tan α − a/(g cos α) with the angle supplied from setting
//! metadata, and the first-order rates map through unchanged.
//!
//! One deliberate deviation from the printed table: the damping row is an
//! identity here, not a sign flip. This bank writes every second-order
//! family as z̈ = −β ż − α z, so a fitted β *is* the physical damping; the
//! "ζ = −β" row in the source material encodes the opposite sign
//! convention for the same quantity.

use crate::error::{Error, Result};
use crate::gtfit::corrected_length;
use crate::ode::{FamilyTag, ParamVector};

/// How one physical parameter is produced from the fitted coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    /// value = γ[index]
    Identity { index: usize },
    /// value = numerator / γ[index] (pendulum L = g_true/α_fit)
    InverseScale { index: usize, numerator: f64 },
    /// μ = tan α − γ[index]/(g cos α); the incline angle comes from the
    /// setting metadata at call time.
    FrictionFromIncline { index: usize, g: f64 },
    /// L = g·(T/2π)² from the extracted period; also emits the
    /// amplitude-corrected inversion when the release angle is known.
    PeriodLength { g: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationEntry {
    pub physical_name: String,
    pub units: String,
    pub formula: Formula,
}

/// Calibration rule for one phenomenon.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRule {
    pub phenomenon: String,
    pub family: FamilyTag,
    pub mapping: Vec<CalibrationEntry>,
}

/// Side information available at calibration time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalibrationAux {
    /// Extracted oscillation period, seconds.
    pub period: Option<f64>,
    /// Release amplitude, radians (enables the amplitude-corrected length).
    pub theta0: Option<f64>,
    /// Incline angle from setting metadata, degrees.
    pub alpha_deg: Option<f64>,
}

/// One calibrated physical value.
#[derive(Debug, Clone, PartialEq)]
pub struct SiValue {
    pub name: String,
    pub value: f64,
    pub units: String,
}

/// Apply a rule to fitted coefficients.
pub fn latent_to_si(
    rule: &CalibrationRule,
    fitted: &ParamVector,
    aux: &CalibrationAux,
) -> Result<Vec<SiValue>> {
    if fitted.family.tag != rule.family {
        return Err(Error::Domain(format!(
            "rule for {} applied to {} coefficients",
            rule.family, fitted.family.tag
        )));
    }
    let mut out = Vec::new();
    for entry in &rule.mapping {
        match entry.formula {
            Formula::Identity { index } => out.push(SiValue {
                name: entry.physical_name.clone(),
                value: fitted.values[index],
                units: entry.units.clone(),
            }),
            Formula::InverseScale { index, numerator } => {
                let denom = fitted.values[index];
                if denom <= 0.0 {
                    return Err(Error::Domain(format!(
                        "undefined calibration: {} requires a positive coefficient, got {denom}",
                        entry.physical_name
                    )));
                }
                out.push(SiValue {
                    name: entry.physical_name.clone(),
                    value: numerator / denom,
                    units: entry.units.clone(),
                });
            }
            Formula::FrictionFromIncline { index, g } => {
                let alpha_deg = aux.alpha_deg.ok_or_else(|| {
                    Error::Domain(
                        "friction calibration needs the incline angle from setting metadata"
                            .into(),
                    )
                })?;
                let mu = crate::gtfit::friction_from_accel(alpha_deg, fitted.values[index], g)?;
                out.push(SiValue {
                    name: entry.physical_name.clone(),
                    value: mu,
                    units: entry.units.clone(),
                });
            }
            Formula::PeriodLength { g } => {
                if let Some(t) = aux.period {
                    let small = g * (t / (2.0 * std::f64::consts::PI)).powi(2);
                    out.push(SiValue {
                        name: format!("{}_period", entry.physical_name),
                        value: small,
                        units: entry.units.clone(),
                    });
                    if let Some(theta0) = aux.theta0 {
                        let est = corrected_length(t, theta0.abs(), g)?;
                        out.push(SiValue {
                            name: format!("{}_period_corrected", entry.physical_name),
                            value: est.corrected,
                            units: entry.units.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rescale fitted coefficients for a frame-interval mismatch: stiffness-like
/// entries scale by (Δt_assumed/Δt_true)², rate-like ones by the ratio
/// itself. A diagnostic for mislabeled capture rates.
pub fn timestep_sensitivity(
    fitted: &ParamVector,
    dt_assumed: f64,
    dt_true: f64,
) -> Result<ParamVector> {
    if !(dt_assumed > 0.0 && dt_true > 0.0) {
        return Err(Error::Domain("timesteps must be positive".into()));
    }
    let ratio = dt_assumed / dt_true;
    let orders = fitted.family.param_time_orders();
    let values = fitted
        .values
        .iter()
        .zip(&orders)
        .map(|(v, &o)| v * ratio.powi(o as i32))
        .collect();
    ParamVector::new(fitted.family.clone(), values)
}

/// The shipped calibration configuration (see [`parse_rules`] for the
/// format). One line per physical parameter, keyed by phenomenon.
pub const DEFAULT_RULES_TEXT: &str = "\
# phenomenon          family                param      units    formula                 args
dropping_ball         second_order_linear   g          m/s^2    identity                0
dropping_ball         second_order_linear   beta       1/s      identity                1
dropped_ball          second_order_linear   g          m/s^2    identity                0
falling_ball          falling_ball_radius   g          m/s^2    identity                0
falling_ball          falling_ball_radius   r0f        m        identity                1
free_fall             falling_ball_radius   g          m/s^2    identity                0
pendulum              nonlinear_pendulum    L          m        inverse_scale           0 9.81
pendulum              nonlinear_pendulum    zeta       1/s      identity                1
pendulum              nonlinear_pendulum    L          m        period_length           9.81
rotating_cone         second_order_linear   alpha      1/s^2    identity                0
rotating_cone         second_order_linear   beta       1/s      identity                1
sliding_cone          constant_accel        a          m/s^2    identity                0
sliding_cone          constant_accel        mu         -        friction_from_incline   0 9.81
sliding_block         constant_accel        a          m/s^2    identity                0
sliding_block         constant_accel        mu         -        friction_from_incline   0 9.81
led                   first_order_decay     gamma      1/s      identity                0
torricelli            torricelli            k          1/s      identity                0
two_moving_pendulum   coupled_pendulum      L1         m        inverse_scale           0 9.81
two_moving_pendulum   coupled_pendulum      L2         m        inverse_scale           1 9.81
two_moving_pendulum   coupled_pendulum      zeta1      1/s      identity                2
two_moving_pendulum   coupled_pendulum      zeta2      1/s      identity                3
two_moving_pendulum   coupled_pendulum      kappa12    1/s^2    identity                4
one_static_pendulum   coupled_pendulum      L1         m        inverse_scale           0 9.81
one_static_pendulum   coupled_pendulum      L2         m        inverse_scale           1 9.81
one_static_pendulum   coupled_pendulum      zeta1      1/s      identity                2
one_static_pendulum   coupled_pendulum      zeta2      1/s      identity                3
one_static_pendulum   coupled_pendulum      kappa12    1/s^2    identity                4
hitting_cones         coupled_contact       kappa      1/s^2    identity                0
hitting_cones         coupled_contact       zeta       1/s      identity                1
";

/// Parse a plain-text rule configuration.
///
/// Whitespace-separated columns: phenomenon, family tag, physical name,
/// units, formula, formula arguments. `#` starts a comment.
pub fn parse_rules(text: &str) -> Result<Vec<CalibrationRule>> {
    let mut rules: Vec<CalibrationRule> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 5 {
            return Err(Error::Parse {
                path: "calibration rules".into(),
                line: lineno + 1,
                msg: "expected: phenomenon family param units formula [args...]".into(),
            });
        }
        let bad = |msg: String| Error::Parse {
            path: "calibration rules".into(),
            line: lineno + 1,
            msg,
        };
        let family: FamilyTag = fields[1]
            .parse()
            .map_err(|_| bad(format!("unknown family `{}`", fields[1])))?;
        let arg = |i: usize| -> Result<f64> {
            fields
                .get(5 + i)
                .ok_or_else(|| bad(format!("missing argument {i}")))?
                .parse::<f64>()
                .map_err(|_| bad(format!("bad numeric argument `{}`", fields[5 + i])))
        };
        let index_arg = |i: usize| -> Result<usize> {
            Ok(arg(i)? as usize)
        };
        let formula = match fields[4] {
            "identity" => Formula::Identity {
                index: index_arg(0)?,
            },
            "inverse_scale" => Formula::InverseScale {
                index: index_arg(0)?,
                numerator: arg(1)?,
            },
            "friction_from_incline" => Formula::FrictionFromIncline {
                index: index_arg(0)?,
                g: arg(1)?,
            },
            "period_length" => Formula::PeriodLength { g: arg(0)? },
            other => return Err(bad(format!("unknown formula `{other}`"))),
        };
        let entry = CalibrationEntry {
            physical_name: fields[2].to_string(),
            units: fields[3].to_string(),
            formula,
        };
        match rules
            .iter_mut()
            .find(|r| r.phenomenon == fields[0] && r.family == family)
        {
            Some(rule) => rule.mapping.push(entry),
            None => rules.push(CalibrationRule {
                phenomenon: fields[0].to_string(),
                family,
                mapping: vec![entry],
            }),
        }
    }
    Ok(rules)
}

/// The built-in rules.
pub fn default_rules() -> Vec<CalibrationRule> {
    parse_rules(DEFAULT_RULES_TEXT).expect("shipped rules parse")
}

/// Find the rule for a phenomenon.
pub fn rule_for<'a>(rules: &'a [CalibrationRule], phenomenon: &str) -> Option<&'a CalibrationRule> {
    rules.iter().find(|r| r.phenomenon == phenomenon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::OdeFamily;

    fn fitted(tag: FamilyTag, values: &[f64]) -> ParamVector {
        ParamVector::new(OdeFamily::single(tag), values.to_vec()).unwrap()
    }

    #[test]
    fn pendulum_length_from_alpha() {
        let rules = default_rules();
        let rule = rule_for(&rules, "pendulum").unwrap();
        let out = latent_to_si(
            rule,
            &fitted(FamilyTag::NonlinearPendulum, &[19.62, 0.02]),
            &CalibrationAux::default(),
        )
        .unwrap();
        let length = out.iter().find(|v| v.name == "L").unwrap();
        assert!((length.value - 0.5).abs() < 1e-12);
        let zeta = out.iter().find(|v| v.name == "zeta").unwrap();
        assert!((zeta.value - 0.02).abs() < 1e-15);
    }

    #[test]
    fn pendulum_period_route() {
        let rules = default_rules();
        let rule = rule_for(&rules, "pendulum").unwrap();
        let aux = CalibrationAux {
            period: Some(1.4185),
            theta0: Some(0.0),
            alpha_deg: None,
        };
        let out = latent_to_si(rule, &fitted(FamilyTag::NonlinearPendulum, &[19.62, 0.02]), &aux)
            .unwrap();
        let lp = out.iter().find(|v| v.name == "L_period").unwrap();
        assert!((lp.value - 9.81 * (1.4185 / (2.0 * std::f64::consts::PI)).powi(2)).abs() < 1e-12);
        assert!((lp.value - 0.50).abs() < 1e-3);
        let lc = out.iter().find(|v| v.name == "L_period_corrected").unwrap();
        assert!((lc.value - lp.value).abs() < 1e-12); // zero amplitude
    }

    #[test]
    fn led_identity_mapping() {
        let rules = default_rules();
        let rule = rule_for(&rules, "led").unwrap();
        let out = latent_to_si(
            rule,
            &fitted(FamilyTag::FirstOrderDecay, &[2.30]),
            &CalibrationAux::default(),
        )
        .unwrap();
        assert_eq!(out[0].name, "gamma");
        assert_eq!(out[0].value, 2.30);
    }

    #[test]
    fn nonpositive_alpha_is_undefined() {
        let rules = default_rules();
        let rule = rule_for(&rules, "pendulum").unwrap();
        let err = latent_to_si(
            rule,
            &fitted(FamilyTag::NonlinearPendulum, &[0.0, 0.02]),
            &CalibrationAux::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn friction_needs_angle_metadata() {
        let rules = default_rules();
        let rule = rule_for(&rules, "sliding_cone").unwrap();
        let coeffs = fitted(FamilyTag::ConstantAccel, &[5.5494]);
        assert!(latent_to_si(rule, &coeffs, &CalibrationAux::default()).is_err());
        let aux = CalibrationAux {
            alpha_deg: Some(45.0),
            ..Default::default()
        };
        let out = latent_to_si(rule, &coeffs, &aux).unwrap();
        let mu = out.iter().find(|v| v.name == "mu").unwrap();
        assert!((mu.value - 0.2).abs() < 1e-3);
    }

    #[test]
    fn calibration_round_trips_are_bijective() {
        // L ↔ α and μ ↔ a invert each other to machine precision.
        for length in [0.35f64, 0.5, 1.2] {
            let alpha = 9.81 / length;
            assert!((9.81 / alpha - length).abs() < 1e-12);
        }
        for mu in [0.0, 0.2, 0.7] {
            let alpha_deg = 52.0f64;
            let alpha = alpha_deg.to_radians();
            let a = 9.81 * (alpha.sin() - mu * alpha.cos());
            let back = crate::gtfit::friction_from_accel(alpha_deg, a, 9.81).unwrap();
            assert!((back - mu).abs() < 1e-12);
        }
    }

    #[test]
    fn timestep_rescaling() {
        let p = fitted(FamilyTag::SecondOrderLinear, &[1.0, 0.5]);
        let same = timestep_sensitivity(&p, 0.02, 0.02).unwrap();
        assert_eq!(same.values, p.values);
        // Assumed step twice the true one: alpha x4, beta x2.
        let scaled = timestep_sensitivity(&p, 0.02, 0.01).unwrap();
        assert!((scaled.values[0] - 4.0).abs() < 1e-12);
        assert!((scaled.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_preset_phenomenon_has_a_rule() {
        let rules = default_rules();
        for name in crate::synth::IRIS_PRESETS
            .iter()
            .chain(crate::synth::DELFYS_PRESETS.iter())
        {
            let spec = crate::synth::preset(name).unwrap();
            let rule = rule_for(&rules, &spec.phenomenon)
                .unwrap_or_else(|| panic!("no rule for {}", spec.phenomenon));
            assert_eq!(rule.family, spec.family.tag, "family mismatch for {name}");
        }
    }
}
