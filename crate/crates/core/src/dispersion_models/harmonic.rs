use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::special_math::{fixed_point, solve_ode, CumulativeQuadrature, OdeSolverConfig, QuadratureRule, QuadratureScheme};

use super::{beta_index, validate_beta_grid, validate_time_grid, BetaGridFunction, DispersionTrajectory};

/// Initial dispersion, its rate, mean and mean velocity; shared by every
/// β node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicInit {
    pub sigma2: f64,
    pub sigma2_rate: f64,
    pub mu: f64,
    pub mu_rate: f64,
}

impl HarmonicInit {
    pub fn at_rest(sigma2: f64) -> Self {
        HarmonicInit {
            sigma2,
            sigma2_rate: 0.0,
            mu: 0.0,
            mu_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub surface: BetaGridFunction,
    /// Trajectory at the physical β, the last node of the β grid.
    pub trajectory: DispersionTrajectory,
}

/// Harmonic oscillator dispersion with the temperature-coupled quantum
/// softening of the spring:
///
/// m s̈ + b ṡ + 2m(ω₀² − k_BT ∫₀^β ħ²/(4m²s²) dβ') s = 2k_BT, s = σ_x²,
///
/// solved simultaneously at every positive β node (method of lines in β),
/// with b held fixed and T = 1/(k_B β) per node. The mean obeys
/// m μ̈ + b μ̇ + mω₀²μ = f.
pub fn solve_harmonic(
    p: &PhysicalParams,
    init: HarmonicInit,
    t_grid: &[f64],
    beta_grid: &[f64],
    scheme: QuadratureScheme,
    cfg: &OdeSolverConfig,
) -> Result<HarmonicSolution> {
    let beta = check_harmonic(p)?;
    validate_time_grid(t_grid)?;
    validate_beta_grid(beta_grid)?;
    let last = beta_grid.len() - 1;
    if beta_index(beta_grid, beta) != Some(last) {
        return Err(Error::GridMismatch(format!(
            "beta grid must end at the physical beta {beta}"
        )));
    }
    if !(init.sigma2 > 0.0) || !init.sigma2.is_finite() {
        return Err(Error::InvalidParameter {
            name: "initial sigma2",
            requirement: "positive",
        });
    }
    let quad = CumulativeQuadrature::new(beta_grid, scheme)?;
    let k = last;
    let (m, b, w2, f) = (p.mass(), p.friction(), p.omega0() * p.omega0(), p.force());
    let c = p.hbar() * p.hbar() / (4.0 * m * m);
    let kt: Vec<f64> = beta_grid.iter().map(|bj| 1.0 / bj).collect();

    let mut g = vec![0.0; k + 1];
    let mut integral = vec![0.0; k + 1];
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let (s, v) = y[..2 * k].split_at(k);
        for j in 1..=k {
            g[j] = c / (s[j - 1] * s[j - 1]);
        }
        quad.apply_into(&g, &mut integral);
        for j in 1..=k {
            let sj = s[j - 1];
            dy[j - 1] = v[j - 1];
            dy[k + j - 1] = if sj > 0.0 {
                (2.0 * kt[j] - b * v[j - 1] - 2.0 * m * (w2 - kt[j] * integral[j]) * sj) / m
            } else {
                f64::NAN
            };
        }
        dy[2 * k] = y[2 * k + 1];
        dy[2 * k + 1] = (f - b * y[2 * k + 1] - m * w2 * y[2 * k]) / m;
    };
    let mut y0 = vec![init.sigma2; k];
    y0.extend(std::iter::repeat(init.sigma2_rate).take(k));
    y0.extend([init.mu, init.mu_rate]);

    let sol = solve_ode(rhs, &y0, t_grid, cfg).map_err(|e| match e {
        Error::NonFinite { location, .. } => Error::NonPhysical {
            context: "harmonic beta-coupled solve",
            t: location,
            detail: "dispersion left the positive axis".into(),
        },
        other => other,
    })?;
    let values: Vec<Vec<f64>> = sol
        .states
        .iter()
        .map(|y| std::iter::once(f64::INFINITY).chain(y[..k].iter().copied()).collect())
        .collect();
    let sigma2 = sol.states.iter().map(|y| y[k - 1]).collect();
    let mu = sol.component(2 * k);
    let trajectory = DispersionTrajectory::new("harmonic", t_grid.to_vec(), sigma2, Some(mu), p)?;
    Ok(HarmonicSolution {
        surface: BetaGridFunction {
            t_grid: t_grid.to_vec(),
            beta_grid: beta_grid.to_vec(),
            values,
        },
        trajectory,
    })
}

fn check_harmonic(p: &PhysicalParams) -> Result<f64> {
    if !(p.omega0() > 0.0) {
        return Err(Error::Config("harmonic solvers require omega0 > 0".into()));
    }
    p.beta()
        .ok_or_else(|| Error::Config("harmonic solvers require T > 0".into()))
}

/// Controls for the stationary β-profile iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    pub rule: QuadratureRule,
    pub theta: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            rule: QuadratureRule::default(),
            theta: 1.0,
            tol: 1e-13,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryProfile {
    pub beta_grid: Vec<f64>,
    /// σ² per node; +∞ at β = 0.
    pub sigma2: Vec<f64>,
    pub iterations: usize,
    pub residuals: Vec<f64>,
}

/// Equilibrium dispersion σ²(β) of the harmonic β-coupled equation.
pub fn stationary_harmonic_dispersion(beta: f64, p: &PhysicalParams, tol: f64) -> Result<f64> {
    let opts = StationaryOptions {
        tol,
        ..Default::default()
    };
    let profile = stationary_harmonic_profile(beta, p, &opts)?;
    Ok(*profile.sigma2.last().expect("profile has nodes"))
}

/// Solves m(ω₀² − k_BT_j J_j)σ_j² = k_BT_j at every node of a uniform
/// grid on [0, β], J_j = ∫₀^{β_j} ħ²/(4m²σ⁴) dβ'.
///
/// Each sweep visits the nodes in increasing β and solves the node's own
/// quadrature term exactly (a quadratic in σ_j²); sweeps are relaxed and
/// repeated from the classical profile 1/(β'mω₀²) until the sup-norm
/// relative change drops below `tol`.
pub fn stationary_harmonic_profile(beta: f64, p: &PhysicalParams, opts: &StationaryOptions) -> Result<StationaryProfile> {
    if !(p.omega0() > 0.0) {
        return Err(Error::Config("harmonic solvers require omega0 > 0".into()));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain {
            function: "stationary_harmonic_dispersion",
            value: beta,
            domain: "beta > 0",
        });
    }
    let nodes = opts.rule.nodes(beta);
    let quad = CumulativeQuadrature::new(&nodes, opts.rule.scheme())?;
    let (m, w2) = (p.mass(), p.omega0() * p.omega0());
    let c = p.hbar() * p.hbar() / (4.0 * m * m);
    let n = nodes.len();
    let classical: Vec<f64> = nodes[1..].iter().map(|b| 1.0 / (b * m * w2)).collect();

    let sweep = |current: &[f64]| -> Result<Vec<f64>> {
        let mut s = vec![f64::INFINITY; n];
        s[1..].copy_from_slice(current);
        let mut g = vec![0.0; n];
        let mut running = vec![0.0; n];
        for j in 1..n {
            let partial = quad.partial(j, &running, &g);
            let a = m * (w2 * nodes[j] - partial);
            if !(a > 0.0) {
                return Err(Error::NonPhysical {
                    context: "stationary harmonic profile",
                    t: nodes[j],
                    detail: "effective spring constant became non-positive".into(),
                });
            }
            let q = m * quad.self_weight(j) * c;
            s[j] = (1.0 + (1.0 + 4.0 * a * q).sqrt()) / (2.0 * a);
            g[j] = c / (s[j] * s[j]);
            running[j] = partial + quad.self_weight(j) * g[j];
        }
        Ok(s[1..].to_vec())
    };
    let fp = fixed_point(sweep, classical, opts.theta, opts.tol, opts.max_iter)?;
    let mut sigma2 = vec![f64::INFINITY];
    sigma2.extend(fp.value);
    Ok(StationaryProfile {
        beta_grid: nodes,
        sigma2,
        iterations: fp.iterations,
        residuals: fp.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};

    fn oscillator(temperature: f64) -> PhysicalParams {
        make_params(RawParams {
            omega0: 1.0,
            temperature,
            ..Default::default()
        })
        .unwrap()
    }

    fn coth_law(beta: f64) -> f64 {
        0.5 / (0.5 * beta).tanh()
    }

    #[test]
    fn coth_ansatz_solves_stationary_condition() {
        // ω₀ = ħ = m = 1: ∫₀^β tanh²(β'/2) dβ' = β − 2tanh(β/2), and the
        // condition β − ∫ = 1/s with s = coth(β/2)/2 holds identically
        for beta in [0.1f64, 1.0, 2.0, 10.0] {
            let integral = beta - 2.0 * (0.5 * beta).tanh();
            let lhs = (1.0 - integral / beta) * coth_law(beta);
            assert!((lhs - 1.0 / beta).abs() <= 1e-14 / beta, "{beta}");
        }
    }

    #[test]
    fn stationary_matches_coth_law() {
        for beta in [0.1, 1.0, 2.0, 10.0, 50.0] {
            let s = stationary_harmonic_dispersion(beta, &oscillator(1.0 / beta), 1e-13).unwrap();
            assert!((s / coth_law(beta) - 1.0).abs() <= 1e-3, "beta = {beta}: {s}");
        }
        let s = stationary_harmonic_dispersion(2.0, &oscillator(0.5), 1e-13).unwrap();
        assert!((s - 0.5 / 1f64.tanh()).abs() <= 1e-4);
        assert!((0.5 / 1f64.tanh() - 0.656518).abs() < 1e-6);
    }

    #[test]
    fn classical_limit() {
        let beta = 0.01;
        let s = stationary_harmonic_dispersion(beta, &oscillator(100.0), 1e-13).unwrap();
        assert!((s * beta - 1.0).abs() <= 1e-4);
    }

    #[test]
    fn ground_state_limit() {
        let s = stationary_harmonic_dispersion(50.0, &oscillator(0.02), 1e-14).unwrap();
        assert!((s / 0.5 - 1.0).abs() <= 1e-10, "{s}");
    }

    #[test]
    fn both_rules_converge_quadratically_or_better() {
        let err = |rule: QuadratureRule| {
            let opts = StationaryOptions { rule, ..Default::default() };
            let prof = stationary_harmonic_profile(2.0, &oscillator(0.5), &opts).unwrap();
            (prof.sigma2.last().unwrap() / coth_law(2.0) - 1.0).abs()
        };
        for scheme in [QuadratureScheme::Trapezoid, QuadratureScheme::Simpson] {
            let coarse = err(QuadratureRule::new(17, scheme).unwrap());
            let fine = err(QuadratureRule::new(33, scheme).unwrap());
            assert!(coarse / fine >= 3.5, "{scheme:?}: {coarse} {fine}");
        }
    }

    #[test]
    fn profile_decreases_with_beta() {
        let opts = StationaryOptions::default();
        let prof = stationary_harmonic_profile(10.0, &oscillator(0.1), &opts).unwrap();
        assert!(prof.sigma2.windows(2).all(|w| w[1] < w[0]));
        assert!(prof.iterations <= 3);
    }

    #[test]
    fn rejects_free_particle() {
        assert!(stationary_harmonic_dispersion(1.0, &PhysicalParams::natural(), 1e-10).is_err());
        assert!(stationary_harmonic_dispersion(0.0, &oscillator(1.0), 1e-10).is_err());
    }

    #[test]
    fn relaxes_to_coth_law() {
        let p = oscillator(0.5);
        let rule = QuadratureRule::default();
        let betas = rule.nodes(2.0);
        let t_grid = [0.0, 10.0, 40.0];
        let sol = solve_harmonic(&p, HarmonicInit::at_rest(1.0), &t_grid, &betas, rule.scheme(), &OdeSolverConfig::default())
            .unwrap();
        let s = sol.trajectory.sigma_x2_at(40.0).unwrap();
        assert!((s / coth_law(2.0) - 1.0).abs() <= 1e-3, "{s}");
        assert!(sol.surface.column(0)[1].is_infinite());
    }

    #[test]
    fn ground_state_from_dynamics() {
        let beta = 50.0;
        let p = oscillator(1.0 / beta);
        let rule = QuadratureRule::default();
        let t_grid = [0.0, 100.0, 400.0, 600.0];
        let sol = solve_harmonic(
            &p,
            HarmonicInit::at_rest(0.8),
            &t_grid,
            &rule.nodes(beta),
            rule.scheme(),
            &OdeSolverConfig::with_tolerances(1e-12, 1e-14),
        )
        .unwrap();
        let s = sol.trajectory.sigma_x2[3];
        assert!((s / 0.5 - 1.0).abs() <= 1e-10, "{s}");
    }

    #[test]
    fn classical_equipartition_from_dynamics() {
        let beta = 0.01;
        let p = oscillator(1.0 / beta);
        let rule = QuadratureRule::default();
        let sol = solve_harmonic(
            &p,
            HarmonicInit::at_rest(50.0),
            &[0.0, 40.0],
            &rule.nodes(beta),
            rule.scheme(),
            &OdeSolverConfig::default(),
        )
        .unwrap();
        let s = sol.trajectory.sigma_x2[1];
        assert!((s * beta - 1.0).abs() <= 1e-4, "{s}");
    }

    #[test]
    fn mean_is_a_damped_driven_oscillator() {
        let p = make_params(RawParams { omega0: 1.0, force: 1.0, friction: 0.5, ..Default::default() }).unwrap();
        let rule = QuadratureRule::trapezoid(9).unwrap();
        let t_grid: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let sol = solve_harmonic(&p, HarmonicInit::at_rest(1.0), &t_grid, &rule.nodes(1.0), rule.scheme(), &OdeSolverConfig::default())
            .unwrap();
        // underdamped: γ = 0.25, ω_d = √(1 − γ²)
        let (g, wd) = (0.25f64, (1.0f64 - 0.0625).sqrt());
        for (t, mu) in t_grid.iter().zip(sol.trajectory.mu.as_ref().unwrap()) {
            let exact = 1.0 - (-g * t).exp() * ((wd * t).cos() + g / wd * (wd * t).sin());
            assert!((mu - exact).abs() <= 1e-8, "t = {t}");
        }
    }

    #[test]
    fn grid_must_end_at_physical_beta() {
        let p = oscillator(0.5);
        let err = solve_harmonic(&p, HarmonicInit::at_rest(1.0), &[0.0, 1.0], &[0.0, 1.0, 3.0], QuadratureScheme::Trapezoid, &OdeSolverConfig::default());
        assert!(matches!(err, Err(Error::GridMismatch(_))));
    }
}
