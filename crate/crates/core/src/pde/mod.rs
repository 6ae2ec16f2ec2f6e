//! One-dimensional finite-difference solvers for the Smoluchowski and
//! telegraph density equations, with classical, semiclassical and
//! quantum (Bohm potential) drift.

mod evolve;
mod potential;
mod quantum;

pub use evolve::{
    evolve, free_grid, max_stable_dt, Boundary, EvolveSpec, Evolution, FluxAssembly, MomentTrajectory, PdeModel,
};
pub use potential::{effective_potential, PotentialSpec};
pub use quantum::{quantum_potential, QuantumPotential, RHO_FLOOR_RELATIVE};

use crate::error::{Error, Result, Warning};

/// Uniform grid of `n` nodes on [x_min, x_max], both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub const MIN_NODES: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || !(x_min < x_max) {
            return Err(Error::InvalidParameter {
                name: "grid bounds",
                requirement: "finite with x_min < x_max",
            });
        }
        if n < Self::MIN_NODES {
            return Err(Error::InvalidParameter {
                name: "grid node count",
                requirement: "at least 16",
            });
        }
        Ok(Grid1D { x_min, x_max, n })
    }

    /// Grid on [center − half_width, center + half_width].
    pub fn centered(center: f64, half_width: f64, n: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h()
    }
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Trapezoid weights h/2, h, …, h, h/2.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.n];
        w[0] = 0.5 * h;
        w[self.n - 1] = 0.5 * h;
        w
    }
}

/// Probability density sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: Grid1D,
    pub rho: Vec<f64>,
}

impl DensityField {
    pub fn new(grid: Grid1D, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} density values for {} nodes",
                rho.len(),
                grid.n()
            )));
        }
        if let Some(i) = rho.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "density",
                location: grid.x(i),
            });
        }
        Ok(DensityField { grid, rho })
    }

    /// Normalized Gaussian with mean `mu` and dispersion `sigma2`.
    pub fn gaussian(grid: Grid1D, mu: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                requirement: "positive",
            });
        }
        let rho = grid
            .nodes()
            .iter()
            .map(|x| (-(x - mu) * (x - mu) / (2.0 * sigma2)).exp())
            .collect();
        let mut field = DensityField::new(grid, rho)?;
        field.normalize()?;
        Ok(field)
    }

    pub fn uniform(grid: Grid1D) -> Self {
        let value = 1.0 / (grid.x_max() - grid.x_min());
        DensityField {
            grid,
            rho: vec![value; grid.n()],
        }
    }

    /// Trapezoid-rule ∫ρ dx.
    pub fn mass(&self) -> f64 {
        self.grid
            .trapezoid_weights()
            .iter()
            .zip(&self.rho)
            .map(|(w, r)| w * r)
            .sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let mass = self.mass();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonPhysical {
                context: "density normalization",
                t: 0.0,
                detail: format!("mass {mass}"),
            });
        }
        self.rho.iter_mut().for_each(|r| *r /= mass);
        Ok(())
    }

    pub fn peak(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub dispersion: f64,
    pub norm: f64,
    pub warning: Option<Warning>,
}

/// Trapezoid-rule mass, mean and dispersion. Mean and dispersion are taken
/// relative to the actual mass; a mass off by more than 1e-6 is flagged.
pub fn moments(rho: &DensityField) -> Moments {
    let w = rho.grid.trapezoid_weights();
    let (mut m0, mut m1) = (0.0, 0.0);
    for (i, (wi, r)) in w.iter().zip(&rho.rho).enumerate() {
        m0 += wi * r;
        m1 += wi * r * rho.grid.x(i);
    }
    let mean = m1 / m0;
    let centered: f64 = w
        .iter()
        .zip(&rho.rho)
        .enumerate()
        .map(|(i, (wi, r))| {
            let d = rho.grid.x(i) - mean;
            wi * r * d * d
        })
        .sum();
    Moments {
        mean,
        dispersion: centered / m0,
        norm: m0,
        warning: ((m0 - 1.0).abs() > 1e-6).then_some(Warning::NormDrift { norm: m0 }),
    }
}
