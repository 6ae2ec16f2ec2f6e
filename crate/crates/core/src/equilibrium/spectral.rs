use crate::error::{Error, Result, Warning};
use crate::params::PhysicalParams;
use crate::pde::{Boundary, DensityField, Grid1D, PotentialSpec};

use super::tridiagonal::{eigenvalue, eigenvector};
use super::{hamiltonian, to_full_grid};

/// Tail weight e^{−β(E_n − E₀)} below which further states are dropped.
pub const TAIL_CUTOFF: f64 = 1e-12;

/// Lowest eigenpairs of the discretized Ĥ with φ = 0 at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub grid: Grid1D,
    pub energies: Vec<f64>,
    /// Full-grid node values, unit norm under the trapezoid rule.
    pub eigenfunctions: Vec<Vec<f64>>,
}

impl SpectralDecomposition {
    /// The `n_states` lowest states.
    pub fn compute(u: &PotentialSpec, p: &PhysicalParams, grid: Grid1D, n_states: usize) -> Result<Self> {
        let (diag, off) = hamiltonian(u, p, &grid, Boundary::Reflecting)?;
        if n_states == 0 || n_states > diag.len() {
            return Err(Error::InvalidParameter {
                name: "n_states",
                requirement: "between 1 and the number of interior nodes",
            });
        }
        let mut spec = SpectralDecomposition {
            grid,
            energies: Vec::with_capacity(n_states),
            eigenfunctions: Vec::with_capacity(n_states),
        };
        let mut unit = Vec::with_capacity(n_states);
        for k in 0..n_states {
            spec.push_state(&diag, off, k, &mut unit);
        }
        Ok(spec)
    }

    fn push_state(&mut self, diag: &[f64], off: f64, k: usize, unit: &mut Vec<Vec<f64>>) {
        let energy = eigenvalue(diag, off, k);
        let v = eigenvector(diag, off, energy, unit);
        let scale = 1.0 / self.grid.h().sqrt();
        let phi: Vec<f64> = v.iter().map(|x| x * scale).collect();
        self.energies.push(energy);
        self.eigenfunctions
            .push(to_full_grid(&phi, self.grid.n(), Boundary::Reflecting));
        unit.push(v);
    }

    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    /// Trapezoid inner product ⟨φ_i, φ_j⟩.
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        let h = self.grid.h();
        self.eigenfunctions[i]
            .iter()
            .zip(&self.eigenfunctions[j])
            .map(|(a, b)| a * b * h)
            .sum()
    }

    /// ‖Ĥφ_k − E_kφ_k‖ under the trapezoid norm.
    pub fn residual(&self, k: usize, u: &PotentialSpec, p: &PhysicalParams) -> Result<f64> {
        let (diag, off) = hamiltonian(u, p, &self.grid, Boundary::Reflecting)?;
        let phi = &self.eigenfunctions[k][1..self.grid.n() - 1];
        let e = self.energies[k];
        let n = phi.len();
        let sum: f64 = (0..n)
            .map(|i| {
                let left = if i > 0 { phi[i - 1] } else { 0.0 };
                let right = if i + 1 < n { phi[i + 1] } else { 0.0 };
                let r = diag[i] * phi[i] + off * (left + right) - e * phi[i];
                r * r
            })
            .sum();
        Ok((sum * self.grid.h()).sqrt())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDensity {
    pub density: DensityField,
    pub z: f64,
    pub log_z: f64,
    pub spectrum: SpectralDecomposition,
    /// e^{−β(E − E₀)} of the first state left out.
    pub tail_weight: f64,
    pub warning: Option<Warning>,
}

/// Thermal density Σ e^{−βE_n}φ_n²/Z from the lowest eigenpairs.
///
/// With `n_states = None` states are added until the next Boltzmann weight
/// relative to the ground state drops below 1e-12. A fixed count whose
/// tail exceeds that is returned with a `TruncatedSpectrum` warning.
pub fn eigen_density(
    u: &PotentialSpec,
    p: &PhysicalParams,
    beta: f64,
    grid: Grid1D,
    n_states: Option<usize>,
) -> Result<EigenDensity> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            requirement: "positive and finite",
        });
    }
    let (diag, off) = hamiltonian(u, p, &grid, Boundary::Reflecting)?;
    let interior = diag.len();
    if let Some(k) = n_states {
        if k == 0 || k > interior {
            return Err(Error::InvalidParameter {
                name: "n_states",
                requirement: "between 1 and the number of interior nodes",
            });
        }
    }
    let mut spec = SpectralDecomposition {
        grid,
        energies: Vec::new(),
        eigenfunctions: Vec::new(),
    };
    let mut unit = Vec::new();
    spec.push_state(&diag, off, 0, &mut unit);
    let e0 = spec.energies[0];
    let tail_weight;
    loop {
        let k = spec.n_states();
        if k == interior {
            tail_weight = 0.0;
            break;
        }
        let next = eigenvalue(&diag, off, k);
        let weight = (-beta * (next - e0)).exp();
        let stop = match n_states {
            Some(limit) => k >= limit,
            None => weight < TAIL_CUTOFF,
        };
        if stop {
            tail_weight = weight;
            break;
        }
        spec.push_state(&diag, off, k, &mut unit);
    }

    let weights: Vec<f64> = spec.energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let mut rho = vec![0.0; grid.n()];
    for (w, phi) in weights.iter().zip(&spec.eigenfunctions) {
        for (r, f) in rho.iter_mut().zip(phi) {
            *r += w * f * f / sum;
        }
    }
    let log_z = -beta * e0 + sum.ln();
    Ok(EigenDensity {
        density: DensityField::new(grid, rho)?,
        z: log_z.exp(),
        log_z,
        spectrum: spec,
        tail_weight,
        warning: (tail_weight > TAIL_CUTOFF).then_some(Warning::TruncatedSpectrum { tail_weight }),
    })
}
