use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::pde::{Boundary, DensityField, Grid1D, PotentialSpec};

use super::tridiagonal::{Cyclic, Tridiagonal};
use super::{active_range, hamiltonian, to_full_grid};

/// What is propagated from β = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialProfile {
    /// Every grid delta at once; ρ is the diagonal of e^{−βĤ}, the thermal
    /// mixture over all states.
    #[default]
    PointBasis,
    /// One constant amplitude; ρ = φ² with φ = e^{−βĤ/2}·const, a single
    /// coherent profile.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImaginaryTimeConfig {
    pub beta_final: f64,
    pub n_beta_steps: usize,
    pub grid: Grid1D,
    pub boundary: Boundary,
    /// Rescale by a common factor after each step and carry it in log Z.
    pub renormalize_each_step: bool,
    pub initial: InitialProfile,
}

impl ImaginaryTimeConfig {
    pub const MIN_STEPS: usize = 16;
    pub const DEFAULT_STEPS: usize = 512;

    pub fn new(beta_final: f64, grid: Grid1D) -> Self {
        ImaginaryTimeConfig {
            beta_final,
            n_beta_steps: Self::DEFAULT_STEPS,
            grid,
            boundary: Boundary::Reflecting,
            renormalize_each_step: true,
            initial: InitialProfile::PointBasis,
        }
    }

    pub fn validate(&self, p: &PhysicalParams) -> Result<()> {
        if !(self.beta_final > 0.0) || !self.beta_final.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta_final",
                requirement: "positive and finite",
            });
        }
        if self.n_beta_steps < Self::MIN_STEPS {
            return Err(Error::InvalidParameter {
                name: "n_beta_steps",
                requirement: "at least 16",
            });
        }
        match p.beta() {
            Some(b) if (b - self.beta_final).abs() <= 1e-12 * b => Ok(()),
            Some(b) => Err(Error::Config(format!(
                "beta_final = {} does not match 1/(k_B T) = {b}",
                self.beta_final
            ))),
            None => Err(Error::Config("imaginary-time density requires T > 0".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImaginaryTimeDensity {
    pub density: DensityField,
    /// tr e^{−βĤ} for `PointBasis`; ∫φ² with ∫φ₀² = 1 for `Uniform`.
    pub z: f64,
    pub log_z: f64,
    pub initial: InitialProfile,
    pub d_beta: f64,
}

enum Kinetic {
    Open(Tridiagonal),
    Ring(Cyclic),
}

impl Kinetic {
    fn solve_in_place(&self, x: &mut [f64]) {
        match self {
            Kinetic::Open(lu) => lu.solve_in_place(x),
            Kinetic::Ring(c) => c.solve_in_place(x),
        }
    }
}

/// One Strang step of ∂_βφ = −Ĥφ/2: potential half step, Crank–Nicolson
/// kinetic step, potential half step.
struct Stepper {
    half_potential: Vec<f64>,
    /// coupling of the explicit kinetic half
    r: f64,
    periodic: bool,
    kinetic: Kinetic,
    scratch: Vec<f64>,
}

impl Stepper {
    fn new(diag: &[f64], off: f64, d_beta: f64, periodic: bool) -> Self {
        let k = -off;
        let m = diag.len();
        let half_potential = diag.iter().map(|d| (-(d - 2.0 * k) * d_beta / 4.0).exp()).collect();
        let r = k * d_beta / 4.0;
        let kinetic = if periodic {
            Kinetic::Ring(Cyclic::factor(1.0 + 2.0 * r, -r, m))
        } else {
            let off = vec![-r; m - 1];
            Kinetic::Open(Tridiagonal::factor(&off, &vec![1.0 + 2.0 * r; m], &off))
        };
        Stepper {
            half_potential,
            r,
            periodic,
            kinetic,
            scratch: vec![0.0; m],
        }
    }

    fn apply(&mut self, phi: &mut [f64]) {
        let m = phi.len();
        phi.iter_mut().zip(&self.half_potential).for_each(|(f, w)| *f *= w);
        let r = self.r;
        for i in 0..m {
            let (left, right) = if self.periodic {
                (phi[(i + m - 1) % m], phi[(i + 1) % m])
            } else {
                (
                    if i > 0 { phi[i - 1] } else { 0.0 },
                    if i + 1 < m { phi[i + 1] } else { 0.0 },
                )
            };
            self.scratch[i] = (1.0 - 2.0 * r) * phi[i] + r * (left + right);
        }
        self.kinetic.solve_in_place(&mut self.scratch);
        phi.iter_mut()
            .zip(&self.scratch)
            .zip(&self.half_potential)
            .for_each(|((f, s), w)| *f = s * w);
    }
}

/// Equilibrium density by propagating ∂_βφ = −Ĥφ/2 from β = 0 to β.
pub fn imaginary_time_density(
    u: &PotentialSpec,
    p: &PhysicalParams,
    cfg: &ImaginaryTimeConfig,
) -> Result<ImaginaryTimeDensity> {
    cfg.validate(p)?;
    let grid = cfg.grid;
    let periodic = cfg.boundary == Boundary::Periodic;
    let (diag, off) = hamiltonian(u, p, &grid, cfg.boundary)?;
    let m = active_range(grid.n(), cfg.boundary).len();
    if periodic && m < 3 {
        return Err(Error::InvalidParameter {
            name: "grid node count",
            requirement: "at least 4 for a periodic ring",
        });
    }
    let d_beta = cfg.beta_final / cfg.n_beta_steps as f64;
    let mut stepper = Stepper::new(&diag, off, d_beta, periodic);
    let h = grid.h();

    let mut columns: Vec<Vec<f64>> = match cfg.initial {
        InitialProfile::PointBasis => (0..m)
            .map(|j| {
                let mut e = vec![0.0; m];
                e[j] = 1.0;
                e
            })
            .collect(),
        InitialProfile::Uniform => vec![vec![1.0 / (h * m as f64).sqrt(); m]],
    };

    let mut log_scale = 0.0;
    for step in 1..=cfg.n_beta_steps {
        for col in columns.iter_mut() {
            stepper.apply(col);
        }
        let peak = columns
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |a, v| a.max(v.abs()));
        if !peak.is_finite() || peak == 0.0 {
            return Err(Error::Unstable {
                step,
                t: step as f64 * d_beta,
                detail: format!("amplitude peak {peak:e} with d_beta = {d_beta:e}"),
            });
        }
        if cfg.renormalize_each_step {
            columns.iter_mut().flatten().for_each(|v| *v /= peak);
            log_scale += peak.ln();
        }
    }

    let mut diag_sum = vec![0.0; m];
    for col in &columns {
        for (d, v) in diag_sum.iter_mut().zip(col) {
            *d += v * v;
        }
    }
    let total: f64 = diag_sum.iter().sum();
    let log_z = 2.0 * log_scale
        + match cfg.initial {
            InitialProfile::PointBasis => total.ln(),
            InitialProfile::Uniform => (h * total).ln(),
        };
    let rho: Vec<f64> = diag_sum.iter().map(|d| d / (h * total)).collect();
    Ok(ImaginaryTimeDensity {
        density: DensityField::new(grid, to_full_grid(&rho, grid.n(), cfg.boundary))?,
        z: log_z.exp(),
        log_z,
        initial: cfg.initial,
        d_beta,
    })
}
