//! Physical parameters and the length/time scales derived from them.
//!
//! Quantities are plain `f64` in any consistent unit system. Zero friction,
//! zero temperature and zero trap frequency are legal values and select the
//! vacuum, ground-state and free-particle code paths respectively.

use crate::error::{Error, Result};

/// Mean interaction potential between particle and bath.
///
/// Fixed to zero everywhere; a constant offset carries no force and would be
/// absorbed into the external potential anyway.
pub const MEAN_INTERACTION_POTENTIAL: f64 = 0.0;

/// Unvalidated parameter values, the input to [`make_params`].
///
/// `Default` gives natural units (every scale equal to one) with a free,
/// unforced particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub hbar: f64,
    pub k_b: f64,
    pub mass: f64,
    pub friction: f64,
    pub temperature: f64,
    pub omega0: f64,
    pub force: f64,
}

impl Default for RawParams {
    fn default() -> Self {
        RawParams {
            hbar: 1.0,
            k_b: 1.0,
            mass: 1.0,
            friction: 1.0,
            temperature: 1.0,
            omega0: 0.0,
            force: 0.0,
        }
    }
}

/// Validated particle and bath parameters of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    hbar: f64,
    k_b: f64,
    mass: f64,
    friction: f64,
    temperature: f64,
    omega0: f64,
    force: f64,
}

/// Validates raw values into a [`PhysicalParams`].
pub fn make_params(raw: RawParams) -> Result<PhysicalParams> {
    let checks: [(&'static str, f64, bool); 7] = [
        ("hbar", raw.hbar, false),
        ("k_B", raw.k_b, false),
        ("mass", raw.mass, false),
        ("friction", raw.friction, true),
        ("temperature", raw.temperature, true),
        ("omega0", raw.omega0, true),
        ("force", raw.force, true),
    ];
    for (name, value, zero_ok) in checks {
        if !value.is_finite() {
            return Err(Error::InvalidParameter {
                name,
                requirement: "finite",
            });
        }
        if name == "force" {
            continue;
        }
        if zero_ok && value < 0.0 {
            return Err(Error::InvalidParameter {
                name,
                requirement: "non-negative",
            });
        }
        if !zero_ok && value <= 0.0 {
            return Err(Error::InvalidParameter {
                name,
                requirement: "positive",
            });
        }
    }
    Ok(PhysicalParams {
        hbar: raw.hbar,
        k_b: raw.k_b,
        mass: raw.mass,
        friction: raw.friction,
        temperature: raw.temperature,
        omega0: raw.omega0,
        force: raw.force,
    })
}

impl PhysicalParams {
    /// ħ = k_B = m = b = T = 1, free particle, no force.
    pub fn natural() -> Self {
        make_params(RawParams::default()).expect("natural units are valid")
    }

    pub fn raw(&self) -> RawParams {
        RawParams {
            hbar: self.hbar,
            k_b: self.k_b,
            mass: self.mass,
            friction: self.friction,
            temperature: self.temperature,
            omega0: self.omega0,
            force: self.force,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn k_b(&self) -> f64 {
        self.k_b
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn friction(&self) -> f64 {
        self.friction
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn force(&self) -> f64 {
        self.force
    }

    /// Thermal energy k_B·T.
    pub fn thermal_energy(&self) -> f64 {
        self.k_b * self.temperature
    }

    /// Inverse temperature 1/(k_B·T), `None` at T = 0.
    pub fn beta(&self) -> Option<f64> {
        (self.temperature > 0.0).then(|| 1.0 / self.thermal_energy())
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.temperature == 0.0
    }

    /// Same parameters at inverse temperature `beta`; friction is untouched.
    pub fn at_beta(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta",
                requirement: "positive and finite",
            });
        }
        Ok(PhysicalParams {
            temperature: 1.0 / (self.k_b * beta),
            ..*self
        })
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        make_params(RawParams {
            temperature,
            ..self.raw()
        })
    }
}

/// Length and time scales fixed by the parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Thermal de Broglie wavelength ħ/(2√(m k_B T)).
    pub lambda_t: f64,
    /// Einstein diffusion constant k_B T / b.
    pub diffusion: f64,
    /// Decoherence time λ_T²/(2D).
    pub t_c: f64,
    /// Momentum relaxation time m/b.
    pub tau_m: f64,
}

impl DerivedScales {
    /// Whether b > 2 m k_B T / ħ, i.e. quantum diffusion outlives momentum
    /// relaxation. Equivalent to t_c > τ_m / 2.
    pub fn is_quantum_overdamped(&self) -> bool {
        self.t_c > 0.5 * self.tau_m
    }
}

/// Scales for a finite-temperature, dissipative parameter set.
pub fn derived_scales(p: &PhysicalParams) -> Result<DerivedScales> {
    if p.temperature == 0.0 {
        return Err(Error::ScalesUndefined(
            "T = 0; use the zero-temperature solvers",
        ));
    }
    if p.friction == 0.0 {
        return Err(Error::ScalesUndefined("b = 0; use the vacuum solvers"));
    }
    let kt = p.thermal_energy();
    let lambda_t = p.hbar / (2.0 * (p.mass * kt).sqrt());
    let diffusion = kt / p.friction;
    Ok(DerivedScales {
        lambda_t,
        diffusion,
        t_c: lambda_t * lambda_t / (2.0 * diffusion),
        tau_m: p.mass / p.friction,
    })
}

/// Momentum dispersion m k_B T + ħ²/(4σ_x²). Accepts σ_x² = +∞.
pub fn momentum_dispersion(sigma_x2: f64, p: &PhysicalParams) -> Result<f64> {
    if !(sigma_x2 > 0.0) {
        return Err(Error::Domain {
            function: "momentum_dispersion",
            value: sigma_x2,
            domain: "sigma_x2 > 0",
        });
    }
    Ok(p.mass * p.thermal_energy() + p.hbar * p.hbar / (4.0 * sigma_x2))
}

/// Dispersion-dependent quantum diffusion coefficient ħ²/(4 m b σ_x²).
pub fn quantum_diffusion(sigma_x2: f64, p: &PhysicalParams) -> Result<f64> {
    if p.friction == 0.0 {
        return Err(Error::ScalesUndefined("b = 0; quantum diffusion undefined"));
    }
    if !(sigma_x2 > 0.0) {
        return Err(Error::Domain {
            function: "quantum_diffusion",
            value: sigma_x2,
            domain: "sigma_x2 > 0",
        });
    }
    Ok(p.hbar * p.hbar / (4.0 * p.mass * p.friction * sigma_x2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(raw: RawParams) -> PhysicalParams {
        make_params(raw).unwrap()
    }

    #[test]
    fn natural_preset() {
        let p = PhysicalParams::natural();
        assert_eq!(p.raw(), RawParams::default());
        assert_eq!(p.hbar(), 1.0);
        assert_eq!(p.omega0(), 0.0);
        assert_eq!(p.force(), 0.0);
        assert_eq!(p.beta(), Some(1.0));
    }

    #[test]
    fn negative_mass_is_rejected() {
        let err = make_params(RawParams {
            mass: -1.0,
            ..RawParams::default()
        })
        .unwrap_err();
        assert_eq!(err.to_string(), "mass must be positive");
    }

    #[test]
    fn rejects_non_finite_and_negative_fields() {
        for raw in [
            RawParams { hbar: 0.0, ..Default::default() },
            RawParams { k_b: -2.0, ..Default::default() },
            RawParams { friction: -1.0, ..Default::default() },
            RawParams { temperature: -1e-3, ..Default::default() },
            RawParams { omega0: -1.0, ..Default::default() },
            RawParams { force: f64::NAN, ..Default::default() },
            RawParams { mass: f64::INFINITY, ..Default::default() },
        ] {
            assert!(make_params(raw).is_err(), "{raw:?}");
        }
        let err = make_params(RawParams { friction: -1.0, ..Default::default() }).unwrap_err();
        assert_eq!(err.to_string(), "friction must be non-negative");
    }

    #[test]
    fn vacuum_zero_temperature_is_legal() {
        let p = params(RawParams {
            friction: 0.0,
            temperature: 0.0,
            ..Default::default()
        });
        assert!(p.is_zero_temperature());
        assert_eq!(p.beta(), None);
        assert!(matches!(derived_scales(&p), Err(Error::ScalesUndefined(_))));
    }

    #[test]
    fn scales_in_natural_units() {
        let s = derived_scales(&PhysicalParams::natural()).unwrap();
        assert_eq!(s.lambda_t, 0.5);
        assert_eq!(s.diffusion, 1.0);
        assert_eq!(s.t_c, 0.125);
        assert_eq!(s.tau_m, 1.0);
    }

    #[test]
    fn scales_scale_with_hbar_and_temperature() {
        let s = derived_scales(&params(RawParams { hbar: 2.0, ..Default::default() })).unwrap();
        assert_eq!(s.lambda_t, 1.0);
        assert_eq!(s.t_c, 0.5);

        let s = derived_scales(&params(RawParams { temperature: 4.0, ..Default::default() })).unwrap();
        assert_eq!(s.lambda_t, 0.25);
        assert_eq!(s.diffusion, 4.0);
        assert_eq!(s.t_c, 0.0078125);
    }

    #[test]
    fn zero_friction_has_no_scales() {
        let p = params(RawParams { friction: 0.0, ..Default::default() });
        assert!(matches!(derived_scales(&p), Err(Error::ScalesUndefined(_))));
    }

    #[test]
    fn momentum_dispersion_examples() {
        let p = PhysicalParams::natural();
        assert_eq!(momentum_dispersion(f64::INFINITY, &p).unwrap(), 1.0);
        assert_eq!(momentum_dispersion(0.25, &p).unwrap(), 2.0);
        let cold = params(RawParams { temperature: 0.0, ..Default::default() });
        assert_eq!(momentum_dispersion(1.0, &cold).unwrap(), 0.25);
        assert!(momentum_dispersion(0.0, &p).is_err());
        assert!(momentum_dispersion(-1.0, &p).is_err());
    }

    #[test]
    fn quantum_overdamped_threshold() {
        // b > 2 m k_B T / ħ = 2 in natural units
        let below = derived_scales(&params(RawParams { friction: 1.9, ..Default::default() })).unwrap();
        let above = derived_scales(&params(RawParams { friction: 2.1, ..Default::default() })).unwrap();
        assert!(!below.is_quantum_overdamped());
        assert!(above.is_quantum_overdamped());
    }

    #[test]
    fn quantum_diffusion_equals_d_lambda_ratio() {
        let p = PhysicalParams::natural();
        let s = derived_scales(&p).unwrap();
        let dq = quantum_diffusion(0.3, &p).unwrap();
        assert!((dq - s.diffusion * s.lambda_t.powi(2) / 0.3).abs() < 1e-15);
    }

    #[test]
    fn at_beta_keeps_friction() {
        let p = PhysicalParams::natural().at_beta(4.0).unwrap();
        assert_eq!(p.temperature(), 0.25);
        assert_eq!(p.friction(), 1.0);
        assert!(PhysicalParams::natural().at_beta(0.0).is_err());
    }

    fn valid_raw() -> impl Strategy<Value = RawParams> {
        (
            -3.0f64..3.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
            -3.0f64..3.0,
        )
            .prop_map(|(h, k, m, b, t)| RawParams {
                hbar: 10f64.powf(h),
                k_b: 10f64.powf(k),
                mass: 10f64.powf(m),
                friction: 10f64.powf(b),
                temperature: 10f64.powf(t),
                omega0: 0.0,
                force: 0.0,
            })
    }

    proptest! {
        #[test]
        fn heisenberg_product_bounded_below(raw in valid_raw(), log_s in -5.0f64..5.0, cold in any::<bool>()) {
            let raw = if cold { RawParams { temperature: 0.0, ..raw } } else { raw };
            let p = make_params(raw).unwrap();
            let s2 = 10f64.powf(log_s);
            let product = s2 * momentum_dispersion(s2, &p).unwrap();
            let bound = p.hbar() * p.hbar() / 4.0;
            if cold {
                prop_assert!((product - bound).abs() <= 1e-14 * bound);
            } else {
                prop_assert!(product > bound);
            }
        }

        #[test]
        fn decoherence_time_identity(raw in valid_raw()) {
            let s = derived_scales(&make_params(raw).unwrap()).unwrap();
            let t_c = s.lambda_t * s.lambda_t / (2.0 * s.diffusion);
            prop_assert!((s.t_c - t_c).abs() <= 1e-15 * t_c);
        }

        #[test]
        fn quadrupling_temperature(raw in valid_raw()) {
            let p = make_params(raw).unwrap();
            let hot = p.with_temperature(4.0 * p.temperature()).unwrap();
            let (s, s4) = (derived_scales(&p).unwrap(), derived_scales(&hot).unwrap());
            prop_assert!((s4.lambda_t - 0.5 * s.lambda_t).abs() <= 1e-14 * s.lambda_t);
            prop_assert!((s4.diffusion - 4.0 * s.diffusion).abs() <= 1e-14 * s4.diffusion);
        }
    }
}
