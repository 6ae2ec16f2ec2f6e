//! Runs a validated scenario and writes its CSV files and manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qbrown_core::dispersion_models::{closed_form_trajectory, default_beta_grid, log_time_grid};
use qbrown_core::{
    compare_models, derived_scales, eigen_density, evolve, imaginary_time_density, momentum_dispersion,
    quantum_potential, semiclassical_density, solve_harmonic, solve_inertial_zero_t, solve_overdamped_bounded,
    solve_overdamped_full, stationary_harmonic_dispersion, Boundary, ClosedFormKind, DensityField, DispersionTrajectory,
    EvolveSpec, FluxAssembly, Grid1D, HarmonicInit, ImaginaryTimeConfig, InertialInit, InitialProfile, ModelSpec,
    OdeSolverConfig, PdeModel, PhysicalParams, PicardConfig, PicardConvention, PotentialSpec, QuadratureScheme,
};

use crate::acceptance;
use crate::config::{Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::report::{number, write_csv, write_table, Column, RunManifest};

/// What a finished run left behind.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
}

impl RunReport {
    /// 0 when the run completed and every check passed, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.manifest.all_passed() {
            0
        } else {
            1
        }
    }
}

/// Runs `cfg` into its output directory. Solver failures are recorded in the
/// manifest and give exit code 1; only I/O problems are returned as errors.
pub fn run_scenario(cfg: &ScenarioConfig, jobs: usize) -> Result<RunReport> {
    let start = Instant::now();
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(Error::io(&dir))?;
    let mut run = Run {
        cfg,
        dir: &dir,
        jobs: jobs.max(1),
        manifest: RunManifest::default(),
    };
    run.manifest.config = cfg
        .settings()
        .iter()
        .map(|s| (s.key.to_string(), s.text.clone(), s.line.is_none()))
        .collect();
    run.manifest.scales = scales(&cfg.params);

    let outcome = match cfg.scenario {
        Scenario::FreeZeroT | Scenario::VacuumSpreading => run.inertial(),
        Scenario::FreeHighFriction => run.high_friction(),
        Scenario::DispersionCompare => run.compare(),
        Scenario::Harmonic => run.harmonic(),
        Scenario::ClassicalTelegraph | Scenario::QuantumZeroTPde | Scenario::SemiclassicalPde => run.pde(),
        Scenario::Equilibrium => run.equilibrium(),
        Scenario::Acceptance => run.acceptance(),
    };
    match outcome {
        Ok(()) => {}
        Err(Error::Numerical(e)) => run.manifest.failure = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    run.manifest.outputs.push("manifest.txt".into());
    run.manifest.wall_time = start.elapsed();
    let manifest = run.manifest;
    manifest.write(&dir.join("manifest.txt"))?;
    Ok(RunReport { out_dir: dir, manifest })
}

/// Derived scales that exist for these parameters.
pub fn scales(p: &PhysicalParams) -> Vec<(String, f64)> {
    match derived_scales(p) {
        Ok(s) => vec![
            ("lambda_t".into(), s.lambda_t),
            ("diffusion".into(), s.diffusion),
            ("t_c".into(), s.t_c),
            ("tau_m".into(), s.tau_m),
        ],
        Err(_) if p.friction() > 0.0 => vec![("tau_m".into(), p.mass() / p.friction())],
        Err(_) => Vec::new(),
    }
}

fn linspace(end: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| end * i as f64 / (points - 1) as f64).collect()
}

fn geomspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                lo * (ratio * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| **x != 0.0 || **y != 0.0)
        .map(|(x, y)| (x / y - 1.0).abs())
        .fold(0.0, f64::max)
}

fn scheme(name: &str) -> QuadratureScheme {
    match name {
        "trapezoid" => QuadratureScheme::Trapezoid,
        _ => QuadratureScheme::Simpson,
    }
}

struct Run<'a> {
    cfg: &'a ScenarioConfig,
    dir: &'a Path,
    jobs: usize,
    manifest: RunManifest,
}

impl Run<'_> {
    fn csv(&mut self, name: &str, columns: &[Column]) -> Result<()> {
        write_csv(&self.dir.join(name), columns)?;
        self.manifest.outputs.push(name.into());
        Ok(())
    }

    fn ode(&mut self) -> OdeSolverConfig {
        let cfg = OdeSolverConfig {
            rel_tol: self.cfg.number("ode.rel_tol"),
            abs_tol: self.cfg.number("ode.abs_tol"),
            max_steps: self.cfg.count("ode.max_steps"),
            ..Default::default()
        };
        self.manifest.solver("ode.method", format!("{:?}", cfg.method));
        self.manifest.solver("ode.rel_tol", number(cfg.rel_tol));
        self.manifest.solver("ode.abs_tol", number(cfg.abs_tol));
        self.manifest.solver("ode.max_steps", cfg.max_steps);
        cfg
    }

    fn picard(&mut self) -> PicardConfig {
        let cfg = PicardConfig {
            theta: self.cfg.number("picard.theta"),
            tol: self.cfg.number("picard.tol"),
            max_iter: self.cfg.count("picard.max_iter"),
            scheme: scheme(self.cfg.word("picard.scheme")),
            convention: match self.cfg.word("picard.convention") {
                "explicit-substitution" => PicardConvention::ExplicitSubstitution,
                _ => PicardConvention::OuterUnknown,
            },
        };
        self.manifest.solver("picard.convention", format!("{:?}", cfg.convention));
        self.manifest.solver("picard.time_scheme", format!("{:?}", cfg.scheme));
        self.manifest.solver("picard.beta_scheme", "Trapezoid");
        if cfg.convention == PicardConvention::ExplicitSubstitution {
            self.manifest.solver("picard.theta", number(cfg.theta));
            self.manifest.solver("picard.tol", number(cfg.tol));
            self.manifest.solver("picard.max_iter", cfg.max_iter);
        }
        cfg
    }

    fn heisenberg(&mut self, traj: &DispersionTrajectory, p: &PhysicalParams) {
        let worst = traj
            .uncertainty_ratios(p)
            .iter()
            .map(|(_, r)| *r)
            .fold(f64::INFINITY, f64::min);
        self.manifest.check(
            format!("heisenberg {}", traj.label),
            traj.satisfies_heisenberg(p),
            format!("min sigma_x2 sigma_p2 / (hbar^2/4) = {}", number(worst)),
        );
    }

    fn trajectory_columns(traj: &DispersionTrajectory, suffix: &str) -> Vec<Column> {
        let mut cols = vec![
            Column::new(format!("sigma_x2{suffix}"), "length^2", traj.sigma_x2.clone()),
            Column::new(format!("sigma_p2{suffix}"), "momentum^2", traj.sigma_p2.clone()),
        ];
        if let Some(mu) = &traj.mu {
            cols.push(Column::new(format!("mu{suffix}"), "length", mu.clone()));
        }
        cols
    }

    fn inertial(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let p = cfg.params;
        let ode = self.ode();
        let times = linspace(cfg.number("time.t_final"), cfg.count("time.points"));
        let sigma0 = cfg.number("init.sigma0");
        let init = InertialInit {
            sigma0,
            sigma_rate0: cfg.number("init.sigma_rate"),
            mu0: cfg.number("init.mu"),
            mu_rate0: cfg.number("init.mu_rate"),
        };
        let traj = solve_inertial_zero_t(&p, init, &times, &ode)?;
        let mut cols = vec![Column::new("t", "time", times.clone())];
        cols.extend(Self::trajectory_columns(&traj, ""));

        if p.friction() == 0.0 {
            let law = closed_form_trajectory(ClosedFormKind::VacuumSpreading { sigma0 }, &times, &p)?;
            if init.sigma_rate0 == 0.0 {
                let dev = max_rel_dev(&traj.sigma_x2, &law.sigma_x2);
                self.manifest.check(
                    "vacuum spreading law",
                    dev <= 1e-6,
                    format!("max rel dev from sigma0^2 + (hbar t / 2 m sigma0)^2 = {} (limit 1e-6)", number(dev)),
                );
            } else {
                self.manifest.result("vacuum_spreading", "closed form assumes init.sigma_rate = 0; not compared");
            }
            cols.push(Column::new("sigma_x2_vacuum_spreading", "length^2", law.sigma_x2));
        } else {
            let rate = p.hbar() * p.hbar() / (p.mass() * p.friction());
            let law: Vec<f64> = times.iter().map(|t| (sigma0.powi(4) + rate * t).sqrt()).collect();
            let tau = p.mass() / p.friction();
            let (late, late_law): (Vec<f64>, Vec<f64>) = traj
                .times
                .iter()
                .zip(traj.sigma_x2.iter().zip(&law))
                .filter(|(t, _)| **t >= 10.0 * tau)
                .map(|(_, (a, b))| (*a, *b))
                .unzip();
            if !late.is_empty() {
                self.manifest.result(
                    "overdamped_law_max_rel_dev_after_10_tau_m",
                    number(max_rel_dev(&late, &late_law)),
                );
            }
            cols.push(Column::new("sigma_x2_overdamped_law", "length^2", law));
        }
        self.heisenberg(&traj, &p);
        self.csv("trajectory.csv", &cols)
    }

    fn high_friction(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let p = cfg.params;
        let s = derived_scales(&p)?;
        let picard = self.picard();
        let ode = self.ode();
        let grid = log_time_grid(
            cfg.number("time.t_min_tc") * s.t_c,
            cfg.number("time.t_max_tc") * s.t_c,
            cfg.count("time.per_decade"),
        );
        let beta_grid = default_beta_grid(&p)?;
        self.manifest.solver("beta_grid.nodes", beta_grid.len());
        self.manifest.solver(
            "beta_grid",
            "0, then 16 per decade from 1e-5 beta to beta, then 8 beta",
        );
        self.manifest.solver("time_grid.nodes", grid.len());
        let full = solve_overdamped_full(&p, &grid, &beta_grid, &picard)?;
        let bounded = solve_overdamped_bounded(&p, 0.0, &grid, &ode)?;
        let lambert = closed_form_trajectory(ClosedFormKind::LambertExact, &grid, &p)?;
        let sup = closed_form_trajectory(ClosedFormKind::Superposition, &grid, &p)?;
        let einstein = closed_form_trajectory(ClosedFormKind::Einstein, &grid, &p)?;

        let mut cols = vec![Column::new("t", "time", grid.clone())];
        cols.extend(Self::trajectory_columns(&full.trajectory, "_overdamped_full"));
        cols.push(Column::new("sigma_x2_overdamped_bounded", "length^2", bounded.sigma_x2.clone()));
        cols.push(Column::new("sigma_x2_lambert_exact", "length^2", lambert.sigma_x2));
        cols.push(Column::new("sigma_x2_superposition", "length^2", sup.sigma_x2.clone()));
        cols.push(Column::new("sigma_x2_einstein", "length^2", einstein.sigma_x2));
        self.csv("trajectory.csv", &cols)?;

        let mut surface = vec![Column::new("t", "time", grid.clone())];
        for (j, beta) in full.surface.beta_grid.iter().enumerate().skip(1) {
            surface.push(Column::new(
                format!("sigma_x2(beta={})", number(*beta)),
                "length^2",
                full.surface.column(j),
            ));
        }
        self.csv("surface.csv", &surface)?;
        self.manifest.result("surface_beta_zero", "omitted: the infinite-temperature column has D = infinity");

        let worst = |hi: &[f64], lo: &[f64]| {
            grid.iter()
                .zip(hi.iter().zip(lo))
                .filter(|(t, _)| **t > 0.0)
                .map(|(_, (h, l))| l / h - 1.0)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let above_bounded = worst(&bounded.sigma_x2, &full.trajectory.sigma_x2);
        self.manifest.check(
            "full <= bounded",
            above_bounded <= 1e-6,
            format!("max full/bounded - 1 = {} (slack 1e-6)", number(above_bounded)),
        );
        let above_sup = worst(&sup.sigma_x2, &bounded.sigma_x2);
        self.manifest.check(
            "bounded <= superposition",
            above_sup <= 1e-8,
            format!("max bounded/superposition - 1 = {} (slack 1e-8)", number(above_sup)),
        );
        self.manifest.check(
            "full non-decreasing in t",
            full.trajectory.is_non_decreasing(),
            "grid differences",
        );
        self.heisenberg(&full.trajectory, &p);
        self.manifest.result("time_levels", full.iterations);
        let residual = full.residuals.iter().copied().fold(0.0, f64::max);
        self.manifest.result("max_level_residual", number(residual));
        let last = grid.len() - 1;
        self.manifest.result(
            "full_over_einstein_at_t_max",
            number(full.trajectory.sigma_x2[last] / (2.0 * s.diffusion * grid[last])),
        );
        Ok(())
    }

    fn compare(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let p = cfg.params;
        let s = derived_scales(&p)?;
        let picard = self.picard();
        let times = geomspace(
            cfg.number("time.t_min_tc") * s.t_c,
            cfg.number("time.t_max_tc") * s.t_c,
            cfg.count("time.points"),
        );
        let models: Vec<ModelSpec> = cfg
            .words("compare.models")
            .iter()
            .map(|label| match *label {
                "overdamped_bounded" => ModelSpec::OverdampedBounded,
                "overdamped_full" => ModelSpec::OverdampedFull(picard),
                other => ModelSpec::Closed(
                    ClosedFormKind::THERMAL
                        .into_iter()
                        .chain([ClosedFormKind::PureQuantum])
                        .find(|k| k.label() == other)
                        .expect("labels validated by the config schema"),
                ),
            })
            .collect();
        self.manifest.solver("ode", "Rk45 rel 1e-10 abs 1e-12 (bounded model)");
        self.manifest.solver(
            "overdamped_full.grid",
            "requested times plus 20 per decade from 1e-4 of the first time, default beta grid",
        );
        let table = compare_models(&p, &times, &models);

        let mut cols = vec![Column::new("t", "time", times.clone())];
        for row in &table.rows {
            match &row.values {
                Ok(values) => {
                    let classical = row.label == ClosedFormKind::Einstein.label();
                    let sigma_p2 = values
                        .iter()
                        .map(|&v| {
                            if classical {
                                p.mass() * p.thermal_energy()
                            } else {
                                momentum_dispersion(v, &p).unwrap_or(f64::NAN)
                            }
                        })
                        .collect();
                    cols.push(Column::new(format!("sigma_x2_{}", row.label), "length^2", values.clone()));
                    cols.push(Column::new(format!("sigma_p2_{}", row.label), "momentum^2", sigma_p2));
                }
                Err(e) => self.manifest.check(format!("model {}", row.label), false, e.clone()),
            }
        }
        self.csv("trajectory.csv", &cols)?;

        let mut rows = Vec::new();
        for a in 0..table.rows.len() {
            for b in a + 1..table.rows.len() {
                if let Some(d) = table.max_rel_dev[a][b] {
                    rows.push(vec![table.rows[a].label.clone(), table.rows[b].label.clone(), number(d)]);
                }
            }
        }
        let name = "comparison.csv";
        write_table(&self.dir.join(name), &["model_a", "model_b", "max_rel_dev [1]"], &rows)?;
        self.manifest.outputs.push(name.into());

        for o in &table.orderings {
            self.manifest.check(
                format!("ordering {}", o.claim),
                o.holds,
                format!("worst relative margin {}", number(o.worst_margin)),
            );
        }
        Ok(())
    }

    fn harmonic(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let p = cfg.params;
        let ode = self.ode();
        let beta = p.beta().expect("validated: T > 0");
        let times = linspace(cfg.number("time.t_final"), cfg.count("time.points"));
        let beta_grid = linspace(beta, cfg.count("beta.nodes"));
        let quad = scheme(cfg.word("beta.scheme"));
        self.manifest.solver("beta_grid", format!("uniform, {} nodes on [0, beta]", beta_grid.len()));
        self.manifest.solver("beta_scheme", format!("{quad:?}"));
        let init = HarmonicInit {
            sigma2: cfg.number("init.sigma2"),
            sigma2_rate: cfg.number("init.sigma2_rate"),
            mu: cfg.number("init.mu"),
            mu_rate: cfg.number("init.mu_rate"),
        };
        let sol = solve_harmonic(&p, init, &times, &beta_grid, quad, &ode)?;
        let mut cols = vec![Column::new("t", "time", times)];
        cols.extend(Self::trajectory_columns(&sol.trajectory, ""));
        self.csv("trajectory.csv", &cols)?;

        let x = 0.5 * beta * p.hbar() * p.omega0();
        let coth_law = p.hbar() / (2.0 * p.mass() * p.omega0()) / x.tanh();
        let stationary = stationary_harmonic_dispersion(beta, &p, 1e-12)?;
        let last = *sol.trajectory.sigma_x2.last().expect("non-empty");
        self.manifest.result("equilibrium_coth", number(coth_law));
        self.manifest.result("equilibrium_stationary", number(stationary));
        self.manifest.result("sigma_x2_at_t_final", number(last));
        self.manifest.result("t_final_rel_dev_from_coth", number((last / coth_law - 1.0).abs()));
        let dev = (stationary / coth_law - 1.0).abs();
        self.manifest.check(
            "stationary dispersion vs coth law",
            dev <= 1e-3,
            format!("rel dev {} (limit 1e-3)", number(dev)),
        );
        self.heisenberg(&sol.trajectory, &p);
        Ok(())
    }

    fn pde(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let p = cfg.params;
        let telegraph = cfg.word("pde.model") == "telegraph";
        let model = match (cfg.scenario, telegraph) {
            (Scenario::ClassicalTelegraph, true) => PdeModel::ClassicalTelegraph,
            (Scenario::ClassicalTelegraph, false) => PdeModel::ClassicalSmoluchowski,
            (Scenario::SemiclassicalPde, true) => PdeModel::SemiclassicalTelegraph,
            (Scenario::SemiclassicalPde, false) => PdeModel::SemiclassicalSmoluchowski,
            (_, true) => PdeModel::QuantumZeroTTelegraph,
            (_, false) => PdeModel::QuantumZeroTSmoluchowski,
        };
        let potential = match cfg.word("pde.potential") {
            "linear" => PotentialSpec::Linear { force: p.force() },
            "harmonic" => PotentialSpec::Harmonic { omega0: p.omega0() },
            "quartic" => PotentialSpec::Quartic {
                k4: cfg.number("pde.k4"),
            },
            _ => PotentialSpec::Free,
        };
        let grid = Grid1D::new(cfg.number("pde.x_min"), cfg.number("pde.x_max"), cfg.count("pde.n"))?;
        let (mu0, s0) = (cfg.number("init.mu"), cfg.number("init.sigma2"));
        let rho0 = DensityField::gaussian(grid, mu0, s0)?;
        let mut spec = EvolveSpec::new(model, potential.clone(), cfg.number("pde.t_final"));
        spec.dt = cfg.optional_number("pde.dt");
        spec.record_every = cfg.count("pde.record_every");
        spec.boundary = match cfg.word("pde.boundary") {
            "periodic" => Boundary::Periodic,
            _ => Boundary::Reflecting,
        };
        if cfg.get("pde.flux").is_some_and(|s| s.text == "position-dependent") {
            spec.flux = FluxAssembly::PositionDependentDiffusion;
        }
        let ev = evolve(&rho0, &spec, &p)?;

        self.manifest.solver("pde.model", model.label());
        self.manifest.solver("pde.potential", potential.label());
        self.manifest.solver("pde.h", number(grid.h()));
        self.manifest.solver("pde.dt", number(ev.dt));
        self.manifest.solver("pde.steps", ev.steps);
        self.manifest.solver("pde.boundary", format!("{:?}", spec.boundary));
        self.manifest.solver("pde.flux", format!("{:?}", spec.flux));
        self.manifest.solver("pde.rho_floor_relative", number(ev.rho_floor_relative));
        self.manifest.result("limited_faces", ev.limited_faces);
        self.manifest.result("max_floored_fraction", number(ev.max_floored_fraction));

        let m = &ev.moments;
        let sigma_p2 = m
            .dispersion
            .iter()
            .map(|&s| momentum_dispersion(s, &p).unwrap_or(f64::NAN))
            .collect();
        let mut cols = vec![
            Column::new("t", "time", m.times.clone()),
            Column::new("mu", "length", m.mean.clone()),
            Column::new("sigma_x2", "length^2", m.dispersion.clone()),
            Column::new("sigma_p2", "momentum^2", sigma_p2),
            Column::new("norm", "1", m.norm.clone()),
        ];
        let (mass, b) = (p.mass(), p.friction());
        let lag = |t: f64| {
            if model.is_telegraph() {
                let tau = mass / b;
                t - tau * (-(-t / tau).exp_m1())
            } else {
                t
            }
        };
        let reflecting = spec.boundary == Boundary::Reflecting;
        if reflecting && b > 0.0 {
            if let PotentialSpec::Free = potential {
                let law: Option<Vec<f64>> = match model {
                    PdeModel::ClassicalTelegraph | PdeModel::ClassicalSmoluchowski => {
                        let d = p.thermal_energy() / b;
                        Some(m.times.iter().map(|&t| s0 + 2.0 * d * lag(t)).collect())
                    }
                    PdeModel::QuantumZeroTSmoluchowski => {
                        let rate = p.hbar() * p.hbar() / (mass * b);
                        Some(m.times.iter().map(|&t| (s0 * s0 + rate * t).sqrt()).collect())
                    }
                    _ => None,
                };
                if let Some(law) = law {
                    let dev = max_rel_dev(&m.dispersion, &law);
                    self.manifest.result("sigma_x2_law_max_rel_dev", number(dev));
                    cols.push(Column::new("sigma_x2_law", "length^2", law));
                }
            }
            if let PotentialSpec::Linear { force } = potential {
                let law: Vec<f64> = m.times.iter().map(|&t| mu0 + force / b * lag(t)).collect();
                let dev = max_rel_dev(
                    &m.mean.iter().map(|x| x - mu0).collect::<Vec<_>>(),
                    &law.iter().map(|x| x - mu0).collect::<Vec<_>>(),
                );
                self.manifest.result("mu_ehrenfest_max_rel_dev", number(dev));
                cols.push(Column::new("mu_ehrenfest", "length", law));
            }
        }
        self.csv("trajectory.csv", &cols)?;

        let per_thousand = ev.max_mass_error * 1e3 / ev.steps.max(1) as f64;
        self.manifest.check(
            "mass conservation",
            per_thousand <= 1e-10,
            format!("max drift {} per 1e3 steps (limit 1e-10)", number(per_thousand)),
        );
        self.manifest.check(
            "non-negative density",
            ev.min_relative_density >= -ev.rho_floor_relative,
            format!("min rho / peak = {}", number(ev.min_relative_density)),
        );

        let quantum = model.is_quantum();
        for (name, field) in [("density_initial.csv", &rho0), ("density_final.csv", &ev.density)] {
            let mut cols = vec![
                Column::new("x", "length", field.grid.nodes()),
                Column::new("rho", "1/length", field.rho.clone()),
            ];
            if quantum {
                cols.push(Column::new("Q", "energy", quantum_potential(field, &p).values));
            }
            self.csv(name, &cols)?;
        }
        Ok(())
    }

    fn equilibrium(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let p = cfg.params;
        let beta = p.beta().expect("validated: T > 0");
        let harmonic = cfg.word("equilibrium.potential") == "harmonic";
        let u = if harmonic {
            PotentialSpec::Harmonic { omega0: p.omega0() }
        } else {
            PotentialSpec::Quartic {
                k4: cfg.number("equilibrium.k4"),
            }
        };
        let grid = Grid1D::centered(0.0, cfg.number("grid.half_width"), cfg.count("grid.n"))?;
        let mut it_cfg = ImaginaryTimeConfig::new(beta, grid);
        it_cfg.n_beta_steps = cfg.count("imaginary.steps");
        if cfg.word("imaginary.initial") == "uniform" {
            it_cfg.initial = InitialProfile::Uniform;
        }
        let states = cfg.optional_count("eigen.states");
        self.manifest.solver("grid.h", number(grid.h()));
        self.manifest.solver("imaginary.d_beta", number(beta / it_cfg.n_beta_steps as f64));
        self.manifest.solver(
            "eigen.states",
            states.map_or("until Boltzmann weight < 1e-12".to_string(), |n| n.to_string()),
        );

        let imaginary = || imaginary_time_density(&u, &p, &it_cfg);
        let eigen = || eigen_density(&u, &p, beta, grid, states);
        let (it, eig) = if self.jobs > 1 {
            rayon::join(imaginary, eigen)
        } else {
            (imaginary(), eigen())
        };
        let (it, eig) = (it?, eig?);
        if let Some(w) = &eig.warning {
            self.manifest.result("eigen_warning", w);
        }
        let semi = if harmonic {
            Some(semiclassical_density(&u, &p, beta, grid)?)
        } else {
            self.manifest.result(
                "semiclassical",
                "omitted: the quartic effective potential is unbounded below, exp(-beta U_eff) is not normalizable",
            );
            None
        };

        let mut cols = vec![
            Column::new("x", "length", grid.nodes()),
            Column::new("rho_imaginary_time", "1/length", it.density.rho.clone()),
            Column::new("rho_eigen", "1/length", eig.density.rho.clone()),
        ];
        if let Some(s) = &semi {
            cols.push(Column::new("rho_semiclassical", "1/length", s.rho.clone()));
        }
        cols.push(Column::new("Q_imaginary_time", "energy", quantum_potential(&it.density, &p).values));
        self.csv("density_equilibrium.csv", &cols)?;

        let dmax = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let drho = dmax(&it.density.rho, &eig.density.rho);
        let dz = (it.z / eig.z - 1.0).abs();
        let s2 = |f: &DensityField| qbrown_core::moments(f).dispersion;
        self.manifest.result("z_imaginary_time", number(it.z));
        self.manifest.result("z_eigen", number(eig.z));
        self.manifest.result("sigma_x2_imaginary_time", number(s2(&it.density)));
        self.manifest.result("sigma_x2_eigen", number(s2(&eig.density)));
        if let Some(s) = &semi {
            self.manifest.result("sigma_x2_semiclassical", number(s2(s)));
            self.manifest.result("max_abs_drho_semiclassical_eigen", number(dmax(&s.rho, &eig.density.rho)));
        }
        if harmonic {
            let x = 0.5 * beta * p.hbar() * p.omega0();
            self.manifest.result(
                "sigma_x2_coth_law",
                number(p.hbar() / (2.0 * p.mass() * p.omega0()) / x.tanh()),
            );
        }
        self.manifest.check(
            "imaginary time vs eigen density",
            drho <= 1e-6,
            format!("max |d rho| = {} (limit 1e-6)", number(drho)),
        );
        let z_note = if it_cfg.initial == InitialProfile::Uniform {
            " (uniform start: Z is the coherent-profile norm, not the trace)"
        } else {
            ""
        };
        self.manifest.check(
            "imaginary time vs eigen Z",
            dz <= 1e-3,
            format!("rel dev {} (limit 1e-3){z_note}", number(dz)),
        );
        Ok(())
    }

    fn acceptance(&mut self) -> Result<()> {
        let ids = if self.cfg.flag("acceptance.quick") {
            acceptance::quick_ids()
        } else {
            acceptance::all_ids()
        };
        self.manifest.solver("acceptance.jobs", self.jobs);
        for v in acceptance::run(&ids, self.jobs) {
            self.manifest.check(
                format!("criterion {} {}", v.id, v.name),
                v.passed(),
                format!(
                    "{} ({:.2} s of {} s)",
                    v.detail,
                    v.elapsed.as_secs_f64(),
                    v.budget.as_secs()
                ),
            );
        }
        Ok(())
    }
}
