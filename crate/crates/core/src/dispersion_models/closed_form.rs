use crate::error::{Error, Result, Warning};
use crate::params::{derived_scales, PhysicalParams};
use crate::special_math::{coth, lambert_w_minus1};

use super::DispersionTrajectory;

/// Analytic dispersion laws σ_x²(t) for a free particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormKind {
    /// 2Dt.
    Einstein,
    /// Free wave packet without friction, σ₀² + (ħt/2mσ₀)².
    VacuumSpreading { sigma0: f64 },
    /// Zero-temperature overdamped law ħ√(t/mb).
    PureQuantum,
    /// ħ√(t/mb) + 2Dt.
    Superposition,
    /// Exact solution of ∂ₜσ² = 2D(1 + λ_T²/σ²) through W₋₁.
    LambertExact,
    /// 2λ_T√(Dt)·coth(λ_T/√(Dt)).
    CothInterpolation,
    /// 2Dt + λ_T²ln(2Dt/λ_T²)/3, valid only once 2Dt > λ_T².
    SemiclassicalLog,
    /// 2Dt + 2λ_T²ln(1 + √(Dt)/λ_T).
    ElementaryLogApprox,
}

impl ClosedFormKind {
    pub fn label(&self) -> &'static str {
        match self {
            ClosedFormKind::Einstein => "einstein",
            ClosedFormKind::VacuumSpreading { .. } => "vacuum_spreading",
            ClosedFormKind::PureQuantum => "pure_quantum",
            ClosedFormKind::Superposition => "superposition",
            ClosedFormKind::LambertExact => "lambert_exact",
            ClosedFormKind::CothInterpolation => "coth_interpolation",
            ClosedFormKind::SemiclassicalLog => "semiclassical_log",
            ClosedFormKind::ElementaryLogApprox => "elementary_log",
        }
    }

    /// The parameter-free laws that need T > 0 and b > 0.
    pub const THERMAL: [ClosedFormKind; 6] = [
        ClosedFormKind::Einstein,
        ClosedFormKind::Superposition,
        ClosedFormKind::LambertExact,
        ClosedFormKind::CothInterpolation,
        ClosedFormKind::SemiclassicalLog,
        ClosedFormKind::ElementaryLogApprox,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    pub warning: Option<Warning>,
}

/// Evaluates one closed-form law at time `t`.
pub fn eval_closed_form(kind: ClosedFormKind, t: f64, p: &PhysicalParams) -> Result<ClosedFormValue> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            function: "eval_closed_form",
            value: t,
            domain: "t >= 0",
        });
    }
    let plain = |value| Ok(ClosedFormValue { value, warning: None });
    match kind {
        ClosedFormKind::VacuumSpreading { sigma0 } => {
            if p.friction() != 0.0 {
                return Err(Error::Config("vacuum spreading requires b = 0".into()));
            }
            if !(sigma0 > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "sigma0",
                    requirement: "positive",
                });
            }
            let growth = p.hbar() * t / (2.0 * p.mass() * sigma0);
            plain(sigma0 * sigma0 + growth * growth)
        }
        ClosedFormKind::PureQuantum => {
            if p.friction() == 0.0 {
                return Err(Error::Config("pure quantum diffusion requires b > 0".into()));
            }
            plain(pure_quantum(t, p))
        }
        _ => {
            let s = derived_scales(p).map_err(|e| Error::Config(format!("{}: {e}", kind.label())))?;
            let dt = s.diffusion * t;
            let l2 = s.lambda_t * s.lambda_t;
            match kind {
                ClosedFormKind::Einstein => plain(2.0 * dt),
                ClosedFormKind::Superposition => plain(pure_quantum(t, p) + 2.0 * dt),
                ClosedFormKind::LambertExact => plain(l2 * lambert_ratio(2.0 * dt / l2)?),
                ClosedFormKind::CothInterpolation => {
                    if t == 0.0 {
                        return plain(0.0);
                    }
                    let root = dt.sqrt();
                    plain(2.0 * s.lambda_t * root * coth(s.lambda_t / root)?)
                }
                ClosedFormKind::SemiclassicalLog => {
                    let value = 2.0 * dt + l2 * (2.0 * dt / l2).ln() / 3.0;
                    let warning = (2.0 * dt <= l2).then_some(Warning::OutsideSemiclassicalRange { t });
                    Ok(ClosedFormValue { value, warning })
                }
                ClosedFormKind::ElementaryLogApprox => {
                    plain(2.0 * dt + 2.0 * l2 * (dt.sqrt() / s.lambda_t).ln_1p())
                }
                ClosedFormKind::VacuumSpreading { .. } | ClosedFormKind::PureQuantum => unreachable!(),
            }
        }
    }
}

fn pure_quantum(t: f64, p: &PhysicalParams) -> f64 {
    p.hbar() * (t / (p.mass() * p.friction())).sqrt()
}

/// y = σ²/λ_T² solving y − ln(1 + y) = τ with τ = 2Dt/λ_T².
fn lambert_ratio(tau: f64) -> Result<f64> {
    let arg = -(-1.0 - tau).exp();
    if arg < 0.0 && tau < 700.0 {
        return Ok(-1.0 - lambert_w_minus1(arg)?);
    }
    // argument underflows: Newton on the implicit relation, y ≈ τ + ln(1 + τ)
    let mut y = tau + tau.ln_1p();
    for _ in 0..50 {
        let f = y - y.ln_1p() - tau;
        let step = f * (1.0 + y) / y;
        y -= step;
        if step.abs() <= 4.0 * f64::EPSILON * y {
            break;
        }
    }
    Ok(y)
}

/// σ² − λ_T²ln(1 + σ²/λ_T²) − 2Dt, zero on the exact bounded solution.
pub fn lambert_implicit_residual(sigma2: f64, t: f64, p: &PhysicalParams) -> Result<f64> {
    let s = derived_scales(p)?;
    let l2 = s.lambda_t * s.lambda_t;
    Ok(sigma2 - l2 * (sigma2 / l2).ln_1p() - 2.0 * s.diffusion * t)
}

/// Samples a closed-form law on `times`.
pub fn closed_form_trajectory(kind: ClosedFormKind, times: &[f64], p: &PhysicalParams) -> Result<DispersionTrajectory> {
    let values = times
        .iter()
        .map(|&t| eval_closed_form(kind, t, p).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    match kind {
        ClosedFormKind::Einstein => DispersionTrajectory::classical(kind.label(), times.to_vec(), values, p),
        _ => DispersionTrajectory::new(kind.label(), times.to_vec(), values, None, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};
    use proptest::prelude::*;

    fn natural() -> PhysicalParams {
        PhysicalParams::natural()
    }

    fn value(kind: ClosedFormKind, t: f64) -> f64 {
        eval_closed_form(kind, t, &natural()).unwrap().value
    }

    fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let t_c = 0.125;
        (0..n)
            .map(|i| t_c * 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn lambert_starts_at_zero() {
        assert_eq!(value(ClosedFormKind::LambertExact, 0.0), 0.0);
    }

    #[test]
    fn superposition_at_crossover() {
        // natural units: λ_T = 0.5, D = 1, so Dt = λ_T² at t = 0.25
        let v = value(ClosedFormKind::Superposition, 0.25);
        assert!((v - 4.0 * 0.25).abs() <= 1e-15, "{v}");
    }

    #[test]
    fn simple_values() {
        assert_eq!(value(ClosedFormKind::PureQuantum, 1.0), 1.0);
        assert_eq!(value(ClosedFormKind::Einstein, 3.0), 6.0);
        assert_eq!(value(ClosedFormKind::CothInterpolation, 0.0), 0.0);
        let vac = make_params(RawParams { friction: 0.0, ..Default::default() }).unwrap();
        let v = eval_closed_form(ClosedFormKind::VacuumSpreading { sigma0: 1.0 }, 2.0, &vac).unwrap();
        assert_eq!(v.value, 2.0);
    }

    #[test]
    fn coth_matches_pure_quantum_at_short_times() {
        let t = 1e-6 * 0.125;
        let (c, q) = (value(ClosedFormKind::CothInterpolation, t), value(ClosedFormKind::PureQuantum, t));
        assert!((c / q - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn coth_long_time_offset() {
        let t = 1e4 * 0.125;
        let c = value(ClosedFormKind::CothInterpolation, t);
        let offset = 2.0 * t + 2.0 * 0.25 / 3.0;
        assert!((c / offset - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn parameter_mismatches_are_config_errors() {
        let vac = make_params(RawParams { friction: 0.0, ..Default::default() }).unwrap();
        let cold = make_params(RawParams { temperature: 0.0, ..Default::default() }).unwrap();
        assert!(matches!(eval_closed_form(ClosedFormKind::Einstein, 1.0, &cold), Err(Error::Config(_))));
        assert!(matches!(eval_closed_form(ClosedFormKind::PureQuantum, 1.0, &vac), Err(Error::Config(_))));
        assert!(eval_closed_form(ClosedFormKind::PureQuantum, 1.0, &cold).is_ok());
        assert!(matches!(
            eval_closed_form(ClosedFormKind::VacuumSpreading { sigma0: 1.0 }, 1.0, &natural()),
            Err(Error::Config(_))
        ));
        assert!(eval_closed_form(ClosedFormKind::VacuumSpreading { sigma0: 0.0 }, 1.0, &vac).is_err());
        assert!(eval_closed_form(ClosedFormKind::Einstein, -1.0, &natural()).is_err());
    }

    #[test]
    fn semiclassical_log_flags_short_times() {
        let early = eval_closed_form(ClosedFormKind::SemiclassicalLog, 0.01, &natural()).unwrap();
        assert!(early.value < 0.0);
        assert!(matches!(early.warning, Some(Warning::OutsideSemiclassicalRange { .. })));
        let late = eval_closed_form(ClosedFormKind::SemiclassicalLog, 10.0, &natural()).unwrap();
        assert_eq!(late.warning, None);
    }

    #[test]
    fn lambert_satisfies_implicit_relation() {
        for t in log_times(-8.0, 6.0, 200) {
            let s = value(ClosedFormKind::LambertExact, t);
            let r = lambert_implicit_residual(s, t, &natural()).unwrap();
            assert!(r.abs() <= 1e-10 * (2.0 * t).max(s), "t = {t}: {r}");
        }
    }

    #[test]
    fn lambert_branches_join_smoothly() {
        // τ = 700 switches from W₋₁ to Newton on the implicit relation
        let t_switch = 700.0 * 0.125;
        let below = value(ClosedFormKind::LambertExact, t_switch * (1.0 - 1e-9));
        let above = value(ClosedFormKind::LambertExact, t_switch * (1.0 + 1e-9));
        // the jump matches the local slope 2D(1 + λ_T²/σ²) across the gap
        let slope = 2.0 * (1.0 + 0.25 / below);
        assert!((above - below - slope * 2e-9 * t_switch).abs() <= 1e-11 * below, "{}", above - below);
    }

    #[test]
    fn orderings_over_six_decades() {
        for t in log_times(-3.0, 3.0, 121) {
            let sup = value(ClosedFormKind::Superposition, t);
            let lam = value(ClosedFormKind::LambertExact, t);
            let ele = value(ClosedFormKind::ElementaryLogApprox, t);
            let semi = value(ClosedFormKind::SemiclassicalLog, t);
            assert!(sup >= lam, "t = {t}");
            assert!(ele >= semi, "t = {t}");
        }
    }

    #[test]
    fn einstein_breaks_heisenberg_only_before_decoherence() {
        let p = natural();
        let times = log_times(-4.0, 4.0, 161);
        let einstein = closed_form_trajectory(ClosedFormKind::Einstein, &times, &p).unwrap();
        for (t, ratio) in einstein.uncertainty_ratios(&p) {
            if t < 0.125 {
                assert!(ratio < 1.0, "t = {t}");
            } else {
                assert!(ratio >= 1.0, "t = {t}");
            }
        }
        for kind in [
            ClosedFormKind::PureQuantum,
            ClosedFormKind::Superposition,
            ClosedFormKind::LambertExact,
            ClosedFormKind::CothInterpolation,
            ClosedFormKind::ElementaryLogApprox,
        ] {
            let traj = closed_form_trajectory(kind, &times, &p).unwrap();
            assert!(traj.satisfies_heisenberg(&p), "{}", kind.label());
        }
    }

    proptest! {
        #[test]
        fn free_laws_increase(log_t in -6.0f64..4.0, factor in 1.0001f64..3.0) {
            let t = 0.125 * 10f64.powf(log_t);
            for kind in ClosedFormKind::THERMAL {
                prop_assert!(value(kind, t * factor) > value(kind, t), "{}", kind.label());
            }
            prop_assert!(value(ClosedFormKind::PureQuantum, t * factor) > value(ClosedFormKind::PureQuantum, t));
        }

        #[test]
        fn lambert_bounded_by_superposition(log_t in -8.0f64..6.0) {
            let t = 0.125 * 10f64.powf(log_t);
            prop_assert!(value(ClosedFormKind::LambertExact, t) <= value(ClosedFormKind::Superposition, t));
        }
    }
}
