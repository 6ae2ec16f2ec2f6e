use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::special_math::{solve_ode, OdeSolverConfig};

use super::{validate_time_grid, DispersionTrajectory};

/// Initial width, width rate, mean and mean velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialInit {
    pub sigma0: f64,
    pub sigma_rate0: f64,
    pub mu0: f64,
    pub mu_rate0: f64,
}

impl InertialInit {
    pub fn at_rest(sigma0: f64) -> Self {
        InertialInit {
            sigma0,
            sigma_rate0: 0.0,
            mu0: 0.0,
            mu_rate0: 0.0,
        }
    }
}

/// Zero-temperature Gaussian packet with inertia and friction:
/// m μ̈ + b μ̇ = f and m σ̈ + b σ̇ = ħ²/(4mσ³), integrated in σ.
pub fn solve_inertial_zero_t(
    p: &PhysicalParams,
    init: InertialInit,
    t_grid: &[f64],
    cfg: &OdeSolverConfig,
) -> Result<DispersionTrajectory> {
    if !p.is_zero_temperature() {
        return Err(Error::Config("inertial zero-temperature solver requires T = 0".into()));
    }
    if p.omega0() != 0.0 {
        return Err(Error::Config(
            "inertial zero-temperature solver is for free particles; use solve_harmonic".into(),
        ));
    }
    if !(init.sigma0 > 0.0) || !init.sigma0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma0",
            requirement: "positive",
        });
    }
    validate_time_grid(t_grid)?;
    let (m, b, f) = (p.mass(), p.friction(), p.force());
    let quantum = p.hbar() * p.hbar() / (4.0 * m * m);
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let sigma = y[0];
        dy[0] = y[1];
        dy[1] = if sigma > 0.0 {
            quantum / (sigma * sigma * sigma) - b / m * y[1]
        } else {
            f64::NAN
        };
        dy[2] = y[3];
        dy[3] = (f - b * y[3]) / m;
    };
    let y0 = [init.sigma0, init.sigma_rate0, init.mu0, init.mu_rate0];
    let sol = solve_ode(rhs, &y0, t_grid, cfg).map_err(|e| match e {
        Error::NonFinite { location, .. } => Error::NonPhysical {
            context: "inertial zero-temperature solve",
            t: location,
            detail: "width reached zero; tighten tolerances or shorten steps".into(),
        },
        other => other,
    })?;
    let sigma2 = sol.states.iter().map(|s| s[0] * s[0]).collect();
    let mu = sol.component(2);
    DispersionTrajectory::new("inertial_zero_t", t_grid.to_vec(), sigma2, Some(mu), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};

    fn cold(friction: f64, force: f64) -> PhysicalParams {
        make_params(RawParams {
            friction,
            temperature: 0.0,
            force,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn vacuum_spreading_without_friction() {
        let p = cold(0.0, 0.0);
        let grid: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
        let traj = solve_inertial_zero_t(&p, InertialInit::at_rest(1.0), &grid, &OdeSolverConfig::default()).unwrap();
        for (t, s) in grid.iter().zip(&traj.sigma_x2) {
            let exact = 1.0 + (t / 2.0).powi(2);
            assert!((s / exact - 1.0).abs() <= 1e-8, "t = {t}");
        }
        assert!((traj.sigma_x2_at(2.0).unwrap() - 2.0).abs() <= 1e-8);
    }

    #[test]
    fn mean_follows_damped_newton() {
        let p = cold(1.0, 1.0);
        let grid: Vec<f64> = (0..=30).map(|i| 0.2 * i as f64).collect();
        let traj = solve_inertial_zero_t(&p, InertialInit::at_rest(1.0), &grid, &OdeSolverConfig::default()).unwrap();
        for (t, mu) in grid.iter().zip(traj.mu.as_ref().unwrap()) {
            let exact = t - (1.0 - (-t).exp());
            assert!((mu - exact).abs() <= 1e-9 * (1.0 + exact), "t = {t}");
        }
    }

    #[test]
    fn overdamped_width_approaches_quarter_power_law() {
        let p = cold(100.0, 0.0);
        let tau = 0.01;
        let grid: Vec<f64> = std::iter::once(0.0)
            .chain((0..=40).map(|i| 10.0 * tau * 10f64.powf(2.0 * i as f64 / 40.0)))
            .collect();
        let sigma0 = (0.01f64 * 10.0 * tau / 100.0).powf(0.25);
        let traj = solve_inertial_zero_t(&p, InertialInit::at_rest(sigma0), &grid, &OdeSolverConfig::default()).unwrap();
        let ratios: Vec<f64> = grid[1..]
            .iter()
            .zip(&traj.sigma_x2[1..])
            .map(|(t, s)| s * s / (t / 100.0))
            .collect();
        // deviation shrinks monotonically and is below 1% by t = 1000 τ_m
        assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs() + 1e-12));
        assert!((ratios.last().unwrap() - 1.0).abs() <= 0.01, "{ratios:?}");
    }

    #[test]
    fn rejects_bad_setups() {
        let grid = [0.0, 1.0];
        let cfg = OdeSolverConfig::default();
        assert!(solve_inertial_zero_t(&PhysicalParams::natural(), InertialInit::at_rest(1.0), &grid, &cfg).is_err());
        assert!(solve_inertial_zero_t(&cold(1.0, 0.0), InertialInit::at_rest(0.0), &grid, &cfg).is_err());
        let trap = make_params(RawParams { temperature: 0.0, omega0: 1.0, ..Default::default() }).unwrap();
        assert!(solve_inertial_zero_t(&trap, InertialInit::at_rest(1.0), &grid, &cfg).is_err());
    }

    #[test]
    fn width_never_drops_below_minimum_uncertainty() {
        let p = cold(2.0, 0.0);
        let grid: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
        let traj = solve_inertial_zero_t(&p, InertialInit::at_rest(0.3), &grid, &OdeSolverConfig::default()).unwrap();
        assert!(traj.satisfies_heisenberg(&p));
        assert!(traj.is_non_decreasing());
    }
}
