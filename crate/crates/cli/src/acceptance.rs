//! The acceptance suite: thirteen end-to-end checks with pinned tolerances
//! and wall-time budgets.

use std::fmt;
use std::time::{Duration, Instant};

use qbrown_core::dispersion_models::{
    closed_form_trajectory, default_beta_grid, lambert_implicit_residual, log_time_grid, OverdampedFull,
};
use qbrown_core::{
    derived_scales, eigen_density, eval_closed_form, evolve, free_grid, imaginary_time_density, make_params, moments,
    semiclassical_density, solve_harmonic, solve_inertial_zero_t, solve_overdamped_bounded, solve_overdamped_full,
    stationary_harmonic_dispersion, ClosedFormKind, DensityField, DispersionTrajectory, EvolveSpec, Grid1D,
    HarmonicInit, ImaginaryTimeConfig, InertialInit, OdeSolverConfig, PdeModel, PhysicalParams, PicardConfig,
    PotentialSpec, QuadratureScheme, RawParams,
};

use rayon::prelude::*;

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u8,
    pub name: &'static str,
    /// Accuracy check alone.
    pub accurate: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.accurate && self.elapsed <= self.budget
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let over = if self.elapsed > self.budget { " over budget" } else { "" };
        write!(
            f,
            "{status} [{:>2}] {}: {} ({:.2} s of {} s{over})",
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

/// Identifier, name and wall-time budget in seconds.
pub const CRITERIA: [(u8, &str, u64); 13] = [
    (1, "einstein asymptote", 10),
    (2, "pure quantum diffusion", 10),
    (3, "lambert exactness", 1),
    (4, "upper-bound ordering", 30),
    (5, "harmonic equilibrium dispersion", 30),
    (6, "vacuum spreading", 1),
    (7, "zero-temperature overdamped law", 60),
    (8, "heisenberg monitor", 1),
    (9, "semiclassical correction", 30),
    (10, "coth interpolation limits", 1),
    (11, "pde conservation and ehrenfest", 60),
    (12, "equilibrium route equivalence", 60),
    (13, "classical telegraph moments", 60),
];

/// Criteria whose budget is at most ten seconds.
pub fn quick_ids() -> Vec<u8> {
    CRITERIA.iter().filter(|c| c.2 <= 10).map(|c| c.0).collect()
}

pub fn all_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs the selected criteria, `jobs` at a time. Each criterion is timed on
/// its own, so running them concurrently inflates the measured wall times.
pub fn run(ids: &[u8], jobs: usize) -> Vec<Verdict> {
    if jobs <= 1 {
        return ids.iter().map(|&id| run_one(id)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| ids.par_iter().map(|&id| run_one(id)).collect()),
        Err(_) => ids.iter().map(|&id| run_one(id)).collect(),
    }
}

/// Runs one criterion; unknown identifiers yield a failing verdict.
pub fn run_one(id: u8) -> Verdict {
    let (name, budget) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| (c.1, c.2))
        .unwrap_or(("unknown criterion", 0));
    let start = Instant::now();
    let outcome = match id {
        1 => einstein_asymptote(),
        2 => pure_quantum_diffusion(),
        3 => lambert_exactness(),
        4 => upper_bound_ordering(),
        5 => harmonic_equilibrium(),
        6 => vacuum_spreading(),
        7 => zero_temperature_law(),
        8 => heisenberg_monitor(),
        9 => semiclassical_correction(),
        10 => coth_limits(),
        11 => pde_conservation(),
        12 => route_equivalence(),
        13 => telegraph_moments(),
        _ => Err(format!("no criterion {id}")),
    };
    let (accurate, detail) = match outcome {
        Ok(check) => (check.ok, check.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    Verdict {
        id,
        name,
        accurate,
        detail,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget),
    }
}

struct Check {
    ok: bool,
    detail: String,
}

type Outcome = Result<Check, String>;

fn check(ok: bool, detail: String) -> Outcome {
    Ok(Check { ok, detail })
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn params(raw: RawParams) -> Result<PhysicalParams, String> {
    make_params(raw).map_err(err)
}

fn cold(friction: f64) -> Result<PhysicalParams, String> {
    params(RawParams {
        temperature: 0.0,
        friction,
        ..Default::default()
    })
}

fn harmonic(beta: f64) -> Result<PhysicalParams, String> {
    params(RawParams {
        omega0: 1.0,
        temperature: 1.0 / beta,
        ..Default::default()
    })
}

/// Time grid for the self-consistent solve in natural units: from 1e-6 t_c
/// to 100 t_c with the last node exactly at 100 t_c.
fn overdamped_grid(t_c: f64) -> Vec<f64> {
    let mut grid = log_time_grid(1e-6 * t_c, 100.0 * t_c, 20);
    *grid.last_mut().expect("non-empty") = 100.0 * t_c;
    grid
}

fn full_solve(p: &PhysicalParams, grid: &[f64]) -> Result<OverdampedFull, String> {
    let beta = default_beta_grid(p).map_err(err)?;
    solve_overdamped_full(p, grid, &beta, &PicardConfig::default()).map_err(err)
}

fn einstein_asymptote() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let t = 100.0 * s.t_c;
    let einstein = 2.0 * s.diffusion * t;
    let grid = overdamped_grid(s.t_c);
    let full = *full_solve(&p, &grid)?.trajectory.sigma_x2.last().expect("non-empty") / einstein;
    let lambert = eval_closed_form(ClosedFormKind::LambertExact, t, &p).map_err(err)?.value / einstein;
    let inside = |r: f64| (0.99..=1.02).contains(&r);
    check(
        inside(full) && inside(lambert),
        format!("sigma2/2Dt at 100 t_c: full {full:.6}, lambert {lambert:.6}, window [0.99, 1.02]"),
    )
}

fn pure_quantum_diffusion() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let grid = overdamped_grid(s.t_c);
    let sol = full_solve(&p, &grid)?;
    let last = sol.surface.beta_grid.len() - 1;
    let column = sol.surface.column(last);
    let quantum = |t: f64, p: &PhysicalParams| p.hbar() * (t / (p.mass() * p.friction())).sqrt();
    let full_dev = grid
        .iter()
        .zip(&column)
        .filter(|(t, _)| **t > 0.0 && **t <= 0.01 * s.t_c)
        .map(|(t, v)| rel(*v, quantum(*t, &p)))
        .fold(0.0, f64::max);

    let (ode_dev, ode_window) = inertial_quarter_power(0.1, false)?;
    check(
        full_dev <= 0.02 && ode_dev <= 0.02,
        format!(
            "max rel dev from hbar sqrt(t/mb): full coldest column {full_dev:.3e} (t <= 0.01 t_c), inertial b=100 {ode_dev:.3e} ({ode_window}), limit 2e-2"
        ),
    )
}

/// Largest relative deviation of the inertial zero-temperature packet at
/// b = 100 from the overdamped law over [10, 10³]τ_m: σ² against ħ√(t/mb),
/// or with `offset` σ⁴ − σ₀⁴ against ħ²t/mb.
fn inertial_quarter_power(sigma0: f64, offset: bool) -> Result<(f64, String), String> {
    let p = cold(100.0)?;
    let tau = p.mass() / p.friction();
    let t_grid: Vec<f64> = std::iter::once(0.0)
        .chain((0..=40).map(|k| 10.0 * tau * 10f64.powf(k as f64 / 20.0)))
        .collect();
    let traj = solve_inertial_zero_t(&p, InertialInit::at_rest(sigma0), &t_grid, &OdeSolverConfig::default())
        .map_err(err)?;
    let rate = p.hbar() * p.hbar() / (p.mass() * p.friction());
    let dev = traj
        .times
        .iter()
        .zip(&traj.sigma_x2)
        .skip(1)
        .map(|(t, s2)| {
            if offset {
                rel(s2 * s2 - sigma0.powi(4), rate * t)
            } else {
                rel(*s2, (rate * t).sqrt())
            }
        })
        .fold(0.0, f64::max);
    Ok((dev, format!("t in [10, 1e3] tau_m, sigma0 = {sigma0}")))
}

fn lambert_exactness() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let grid = log_time_grid(1e-3 * s.t_c, 1e3 * s.t_c, 20);
    let traj = solve_overdamped_bounded(&p, 0.0, &grid, &OdeSolverConfig::default()).map_err(err)?;
    let mut dev = 0.0f64;
    let mut residual = 0.0f64;
    for (t, s2) in grid.iter().zip(&traj.sigma_x2).skip(1) {
        let exact = eval_closed_form(ClosedFormKind::LambertExact, *t, &p).map_err(err)?.value;
        dev = dev.max(rel(*s2, exact));
        let r = lambert_implicit_residual(*s2, *t, &p).map_err(err)?;
        residual = residual.max(r.abs() / (2.0 * s.diffusion * t));
    }
    check(
        dev <= 1e-8 && residual <= 1e-8,
        format!("max rel dev {dev:.3e}, max implicit residual {residual:.3e}, limit 1e-8"),
    )
}

fn upper_bound_ordering() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let grid = overdamped_grid(s.t_c);
    let full = full_solve(&p, &grid)?.trajectory;
    let bounded = solve_overdamped_bounded(&p, 0.0, &grid, &OdeSolverConfig::default()).map_err(err)?;
    let mut worst_full = f64::NEG_INFINITY;
    let mut worst_lambert = f64::NEG_INFINITY;
    for (i, t) in grid.iter().enumerate().skip(1) {
        worst_full = worst_full.max(full.sigma_x2[i] / bounded.sigma_x2[i] - 1.0);
        let lambert = eval_closed_form(ClosedFormKind::LambertExact, *t, &p).map_err(err)?.value;
        let sup = eval_closed_form(ClosedFormKind::Superposition, *t, &p).map_err(err)?.value;
        worst_lambert = worst_lambert.max(lambert / sup - 1.0);
    }
    check(
        worst_full <= 1e-6 && worst_lambert <= 0.0,
        format!(
            "max full/bounded - 1 = {worst_full:.3e} (slack 1e-6), max lambert/superposition - 1 = {worst_lambert:.3e}"
        ),
    )
}

fn harmonic_equilibrium() -> Outcome {
    let mut worst_stationary = 0.0f64;
    let mut worst_imaginary = 0.0f64;
    for beta in [0.1, 1.0, 2.0, 10.0] {
        let p = harmonic(beta)?;
        let exact = 0.5 / (0.5 * beta).tanh();
        let stationary = stationary_harmonic_dispersion(beta, &p, 1e-12).map_err(err)?;
        worst_stationary = worst_stationary.max(rel(stationary, exact));
        let half = 12.0 * exact.sqrt();
        let grid = Grid1D::centered(0.0, half, 801).map_err(err)?;
        let it = imaginary_time_density(&PotentialSpec::Harmonic { omega0: 1.0 }, &p, &ImaginaryTimeConfig::new(beta, grid))
            .map_err(err)?;
        worst_imaginary = worst_imaginary.max(rel(moments(&it.density).dispersion, exact));
    }
    check(
        worst_stationary <= 1e-3 && worst_imaginary <= 1e-3,
        format!(
            "max rel dev from coth law over beta hbar omega0 in {{0.1, 1, 2, 10}}: stationary {worst_stationary:.3e}, imaginary time {worst_imaginary:.3e}, limit 1e-3"
        ),
    )
}

fn vacuum_spreading() -> Outcome {
    let p = params(RawParams {
        friction: 0.0,
        temperature: 0.0,
        ..Default::default()
    })?;
    let sigma0 = 1.0;
    let grid: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
    let traj = solve_inertial_zero_t(&p, InertialInit::at_rest(sigma0), &grid, &OdeSolverConfig::default())
        .map_err(err)?;
    let dev = grid
        .iter()
        .zip(&traj.sigma_x2)
        .map(|(t, s2)| {
            let exact = eval_closed_form(ClosedFormKind::VacuumSpreading { sigma0 }, *t, &p)
                .map(|v| v.value)
                .unwrap_or(f64::NAN);
            rel(*s2, exact)
        })
        .fold(0.0, f64::max);
    check(dev <= 1e-6, format!("max rel dev over t in [0, 10]: {dev:.3e}, limit 1e-6"))
}

fn zero_temperature_law() -> Outcome {
    let (ode_dev, window) = inertial_quarter_power(0.2, true)?;
    let mut pde = Vec::new();
    for model in [PdeModel::QuantumZeroTSmoluchowski, PdeModel::QuantumZeroTTelegraph] {
        pde.push((model.label(), quantum_pde_quarter_power(model)?));
    }
    let ok = ode_dev <= 0.02 && pde.iter().all(|(_, d)| *d <= 0.02);
    let pde_text: Vec<String> = pde.iter().map(|(l, d)| format!("{l} {d:.3e}")).collect();
    check(
        ok,
        format!(
            "max rel dev of sigma^4 - sigma0^4 from hbar^2 t/mb at b=100: ode {ode_dev:.3e} ({window}); pde {} (sigma0 = 0.2), limit 2e-2",
            pde_text.join(", ")
        ),
    )
}

/// Largest relative deviation of σ⁴ − σ₀⁴ from ħ²t/mb over [10, 10³]τ_m.
fn quantum_pde_quarter_power(model: PdeModel) -> Result<f64, String> {
    let p = cold(100.0)?;
    let tau = p.mass() / p.friction();
    let s0 = 0.2f64;
    let rate = p.hbar() * p.hbar() / (p.mass() * p.friction());
    let t_final = 1e3 * tau;
    let sigma_max = (s0.powi(4) + rate * t_final).powf(0.25);
    let grid = free_grid(0.0, sigma_max, s0 / 6.0).map_err(err)?;
    let rho = DensityField::gaussian(grid, 0.0, s0 * s0).map_err(err)?;
    let mut spec = EvolveSpec::new(model, PotentialSpec::Free, t_final);
    spec.record_every = 500;
    let ev = evolve(&rho, &spec, &p).map_err(err)?;
    Ok(ev
        .moments
        .times
        .iter()
        .zip(&ev.moments.dispersion)
        .filter(|(t, _)| **t >= 10.0 * tau * (1.0 - 1e-12))
        .map(|(t, s2)| rel(s2 * s2 - s0.powi(4), rate * t))
        .fold(0.0, f64::max))
}

fn heisenberg_monitor() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let grid = log_time_grid(1e-3 * s.t_c, 1e3 * s.t_c, 20);
    let mut quantum: Vec<DispersionTrajectory> = [
        ClosedFormKind::PureQuantum,
        ClosedFormKind::Superposition,
        ClosedFormKind::LambertExact,
        ClosedFormKind::CothInterpolation,
        ClosedFormKind::ElementaryLogApprox,
    ]
    .iter()
    .map(|k| closed_form_trajectory(*k, &grid, &p))
    .collect::<qbrown_core::Result<_>>()
    .map_err(err)?;
    quantum.push(solve_overdamped_bounded(&p, 0.0, &grid, &OdeSolverConfig::default()).map_err(err)?);

    let cold_p = cold(1.0)?;
    let t_lin: Vec<f64> = (0..=50).map(|k| 0.2 * k as f64).collect();
    let mut cold_runs = vec![solve_inertial_zero_t(&cold_p, InertialInit::at_rest(0.5), &t_lin, &OdeSolverConfig::default())
        .map_err(err)?];
    let vacuum = params(RawParams {
        friction: 0.0,
        temperature: 0.0,
        ..Default::default()
    })?;
    cold_runs.push(closed_form_trajectory(ClosedFormKind::VacuumSpreading { sigma0: 0.5 }, &t_lin, &vacuum).map_err(err)?);

    let hp = harmonic(2.0)?;
    let beta_grid: Vec<f64> = (0..=64).map(|k| 2.0 * k as f64 / 64.0).collect();
    let harm = solve_harmonic(
        &hp,
        HarmonicInit::at_rest(1.0),
        &t_lin,
        &beta_grid,
        QuadratureScheme::Simpson,
        &OdeSolverConfig::default(),
    )
    .map_err(err)?
    .trajectory;

    let mut failures: Vec<String> = quantum
        .iter()
        .filter(|t| !t.satisfies_heisenberg(&p))
        .map(|t| t.label.clone())
        .collect();
    failures.extend(cold_runs.iter().filter(|t| !t.satisfies_heisenberg(&cold_p)).map(|t| t.label.clone()));
    if !harm.satisfies_heisenberg(&hp) {
        failures.push(harm.label.clone());
    }

    let einstein = closed_form_trajectory(ClosedFormKind::Einstein, &grid, &p).map_err(err)?;
    let ratios = einstein.uncertainty_ratios(&p);
    let early_violates = ratios.iter().filter(|(t, _)| *t < s.t_c).all(|(_, r)| *r < 1.0);
    let late_holds = ratios.iter().filter(|(t, _)| *t >= s.t_c).all(|(_, r)| *r >= 1.0 - 1e-12);
    let n_checked = quantum.len() + cold_runs.len() + 1;
    check(
        failures.is_empty() && early_violates && late_holds,
        format!(
            "{} of {n_checked} quantum trajectories violate; einstein violates for all t < t_c: {early_violates}, holds for t >= t_c: {late_holds}",
            failures.len()
        ),
    )
}

fn semiclassical_correction() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let t = 100.0 * s.t_c;
    let l2 = s.lambda_t * s.lambda_t;
    let einstein = 2.0 * s.diffusion * t;
    let grid = overdamped_grid(s.t_c);
    let full = *full_solve(&p, &grid)?.trajectory.sigma_x2.last().expect("non-empty");
    let excess = (full - einstein) / l2;
    let target = (einstein / l2).ln() / 3.0;
    let elementary = eval_closed_form(ClosedFormKind::ElementaryLogApprox, t, &p).map_err(err)?.value;
    let semiclassical = eval_closed_form(ClosedFormKind::SemiclassicalLog, t, &p).map_err(err)?.value;
    let dev = rel(excess, target);
    check(
        dev <= 0.1 && elementary > semiclassical,
        format!(
            "(sigma2_full - 2Dt)/lambda^2 = {excess:.4} vs ln(2Dt/lambda^2)/3 = {target:.4} (rel dev {dev:.3e}, limit 0.1); elementary {elementary:.6} > semiclassical {semiclassical:.6}: {}",
            elementary > semiclassical
        ),
    )
}

fn coth_limits() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let value = |k, t| eval_closed_form(k, t, &p).map(|v| v.value).map_err(err);
    let t_short = 1e-6 * s.t_c;
    let short = rel(value(ClosedFormKind::CothInterpolation, t_short)?, value(ClosedFormKind::PureQuantum, t_short)?);
    let t_long = 1e4 * s.t_c;
    let offset = 2.0 * s.diffusion * t_long + 2.0 * s.lambda_t * s.lambda_t / 3.0;
    let long = rel(value(ClosedFormKind::CothInterpolation, t_long)?, offset);
    check(
        short <= 1e-4 && long <= 1e-3,
        format!("vs pure quantum at 1e-6 t_c {short:.3e} (limit 1e-4); vs 2Dt + 2lambda^2/3 at 1e4 t_c {long:.3e} (limit 1e-3)"),
    )
}

fn pde_conservation() -> Outcome {
    let f = 0.5;
    let grid = Grid1D::centered(0.0, 8.0, 321).map_err(err)?;
    let rho = DensityField::gaussian(grid, -1.0, 0.3).map_err(err)?;
    let mut worst_mass = 0.0f64;
    let mut worst_mean = 0.0f64;
    for model in PdeModel::ALL {
        let p = if model.is_quantum() { cold(1.0)? } else { PhysicalParams::natural() };
        let (m, b) = (p.mass(), p.friction());
        let tau = m / b;
        let mut spec = EvolveSpec::new(model, PotentialSpec::Linear { force: f }, 2.0);
        spec.record_every = 100;
        let ev = evolve(&rho, &spec, &p).map_err(err)?;
        worst_mass = worst_mass.max(ev.max_mass_error * 1e3 / ev.steps.max(1) as f64);
        for (t, mu) in ev.moments.times.iter().zip(&ev.moments.mean).skip(1) {
            let shift = if model.is_telegraph() {
                f / b * (t - tau * (1.0 - (-t / tau).exp()))
            } else {
                f * t / b
            };
            worst_mean = worst_mean.max(rel(mu + 1.0, shift));
        }
    }
    check(
        worst_mass <= 1e-10 && worst_mean <= 5e-3,
        format!(
            "mass drift per 1e3 steps {worst_mass:.3e} (limit 1e-10); max rel dev of mean shift {worst_mean:.3e} (limit 5e-3) over all six models"
        ),
    )
}

fn route_equivalence() -> Outcome {
    let mut worst_rho = 0.0f64;
    let mut worst_z = 0.0f64;
    let cases = [
        (PotentialSpec::Harmonic { omega0: 1.0 }, harmonic(2.0)?, 2.0, Grid1D::centered(0.0, 8.0, 321).map_err(err)?),
        (
            PotentialSpec::Quartic { k4: 1.0 },
            PhysicalParams::natural(),
            1.0,
            Grid1D::centered(0.0, 4.0, 161).map_err(err)?,
        ),
    ];
    for (u, p, beta, grid) in &cases {
        let it = imaginary_time_density(u, p, &ImaginaryTimeConfig::new(*beta, *grid)).map_err(err)?;
        let eig = eigen_density(u, p, *beta, *grid, None).map_err(err)?;
        let d = it
            .density
            .rho
            .iter()
            .zip(&eig.density.rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst_rho = worst_rho.max(d);
        worst_z = worst_z.max(rel(it.z, eig.z));
    }

    let beta = 0.3;
    let p = harmonic(beta)?;
    let grid = Grid1D::centered(0.0, 15.0, 1201).map_err(err)?;
    let u = PotentialSpec::Harmonic { omega0: 1.0 };
    let semi = moments(&semiclassical_density(&u, &p, beta, grid).map_err(err)?).dispersion;
    let it = moments(&imaginary_time_density(&u, &p, &ImaginaryTimeConfig::new(beta, grid)).map_err(err)?.density).dispersion;
    let eig = moments(&eigen_density(&u, &p, beta, grid, None).map_err(err)?.density).dispersion;
    let semi_dev = rel(semi, it).max(rel(semi, eig));
    check(
        worst_rho <= 1e-6 && worst_z <= 1e-3 && semi_dev <= 5e-3,
        format!(
            "harmonic and quartic: max |d rho| {worst_rho:.3e} (limit 1e-6), Z rel dev {worst_z:.3e} (limit 1e-3); semiclassical sigma2 at beta hbar omega0 = 0.3 rel dev {semi_dev:.3e} (limit 5e-3)"
        ),
    )
}

fn telegraph_moments() -> Outcome {
    let p = PhysicalParams::natural();
    let s = derived_scales(&p).map_err(err)?;
    let (d, tau) = (s.diffusion, s.tau_m);
    let s0 = 0.25;
    let t_final = 10.0 * tau;
    let sigma_max = (s0 + 2.0 * d * t_final).sqrt();
    let grid = free_grid(0.0, sigma_max, 0.05).map_err(err)?;
    let rho = DensityField::gaussian(grid, 0.0, s0).map_err(err)?;
    let mut spec = EvolveSpec::new(PdeModel::ClassicalTelegraph, PotentialSpec::Free, t_final);
    spec.record_every = 10;
    let ev = evolve(&rho, &spec, &p).map_err(err)?;
    let dev = ev
        .moments
        .times
        .iter()
        .zip(&ev.moments.dispersion)
        .skip(1)
        .map(|(t, s2)| rel(s2 - s0, 2.0 * d * (t - tau * (1.0 - (-t / tau).exp()))))
        .fold(0.0, f64::max);
    check(
        dev <= 0.02,
        format!("max rel dev of sigma2(t) - sigma2(0) from 2D[t - tau(1 - e^(-t/tau))] over (0, 10 tau_m]: {dev:.3e}, limit 2e-2"),
    )
}
