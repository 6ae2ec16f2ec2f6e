//! Dispersion laws for a Brownian particle: closed forms, the inertial
//! zero-temperature equations, the harmonic β-coupled system and the
//! high-friction free-particle equations.

mod closed_form;
mod compare;
mod harmonic;
mod inertial;
mod overdamped;

pub use closed_form::{
    closed_form_trajectory, eval_closed_form, lambert_implicit_residual, ClosedFormKind, ClosedFormValue,
};
pub use compare::{compare_models, ComparisonRow, ComparisonTable, ModelSpec, OrderingVerdict};
pub use harmonic::{
    solve_harmonic, stationary_harmonic_dispersion, stationary_harmonic_profile, HarmonicInit, HarmonicSolution,
    StationaryOptions, StationaryProfile,
};
pub use inertial::{solve_inertial_zero_t, InertialInit};
pub use overdamped::{
    default_beta_grid, log_time_grid, solve_overdamped_bounded, solve_overdamped_full, OverdampedFull,
    PicardConfig, PicardConvention,
};

use crate::error::{Error, Result};
use crate::params::{momentum_dispersion, PhysicalParams};

/// σ_x², optional mean μ and momentum dispersion σ_p² of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTrajectory {
    pub label: String,
    pub times: Vec<f64>,
    pub sigma_x2: Vec<f64>,
    pub mu: Option<Vec<f64>>,
    /// m k_B T + ħ²/(4σ_x²); +∞ where σ_x² = 0, NaN where σ_x² < 0.
    /// Classical laws carry m k_B T alone.
    pub sigma_p2: Vec<f64>,
}

impl DispersionTrajectory {
    pub fn new(
        label: impl Into<String>,
        times: Vec<f64>,
        sigma_x2: Vec<f64>,
        mu: Option<Vec<f64>>,
        p: &PhysicalParams,
    ) -> Result<Self> {
        if times.len() != sigma_x2.len() || mu.as_ref().is_some_and(|m| m.len() != times.len()) {
            return Err(Error::GridMismatch("trajectory arrays differ in length".into()));
        }
        if times.first().is_some_and(|t| *t < 0.0) {
            return Err(Error::GridMismatch("trajectory starts before t = 0".into()));
        }
        let sigma_p2 = sigma_x2
            .iter()
            .map(|&s| {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    momentum_dispersion(s, p).unwrap_or(f64::NAN)
                }
            })
            .collect();
        Ok(DispersionTrajectory {
            label: label.into(),
            times,
            sigma_x2,
            mu,
            sigma_p2,
        })
    }

    /// Classical law: σ_p² = m k_B T without the ħ²/(4σ_x²) term.
    pub fn classical(
        label: impl Into<String>,
        times: Vec<f64>,
        sigma_x2: Vec<f64>,
        p: &PhysicalParams,
    ) -> Result<Self> {
        let mut traj = Self::new(label, times, sigma_x2, None, p)?;
        traj.sigma_p2.fill(p.mass() * p.thermal_energy());
        Ok(traj)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// σ_x²σ_p² / (ħ²/4) at every output time with t > 0.
    pub fn uncertainty_ratios(&self, p: &PhysicalParams) -> Vec<(f64, f64)> {
        let bound = 0.25 * p.hbar() * p.hbar();
        self.times
            .iter()
            .zip(self.sigma_x2.iter().zip(&self.sigma_p2))
            .filter(|(t, _)| **t > 0.0)
            .map(|(t, (s, sp))| (*t, s * sp / bound))
            .collect()
    }

    /// Heisenberg check σ_x²σ_p² ≥ ħ²/4 at all t > 0 (round-off slack only).
    pub fn satisfies_heisenberg(&self, p: &PhysicalParams) -> bool {
        self.uncertainty_ratios(p)
            .iter()
            .all(|(_, r)| *r >= 1.0 - 1e-12)
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.sigma_x2.windows(2).all(|w| w[1] >= w[0])
    }

    /// Linear interpolation of σ_x² at `t` inside the time range.
    pub fn sigma_x2_at(&self, t: f64) -> Option<f64> {
        let i = self.times.partition_point(|&x| x < t);
        if i == self.times.len() {
            return None;
        }
        if self.times[i] == t {
            return Some(self.sigma_x2[i]);
        }
        if i == 0 {
            return None;
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        Some((1.0 - w) * self.sigma_x2[i - 1] + w * self.sigma_x2[i])
    }
}

/// σ_x²(t_i, β_j) on a time × inverse-temperature tensor grid.
///
/// `values[i][j]` belongs to `t_grid[i]` and `beta_grid[j]`. The β = 0
/// column holds `f64::INFINITY` for t > 0: the infinite-temperature limit
/// spreads without bound and contributes nothing to β-integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGridFunction {
    pub t_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl BetaGridFunction {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    pub fn beta_index(&self, beta: f64) -> Option<usize> {
        beta_index(&self.beta_grid, beta)
    }
}

pub(crate) fn beta_index(grid: &[f64], beta: f64) -> Option<usize> {
    grid.iter()
        .position(|&b| (b - beta).abs() <= 1e-12 * beta.abs().max(f64::MIN_POSITIVE))
}

pub(crate) fn validate_beta_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(Error::GridMismatch(
            "beta grid must start at 0 and hold at least one positive node".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|b| !b.is_finite()) {
        return Err(Error::GridMismatch("beta grid must be strictly increasing".into()));
    }
    Ok(())
}

pub(crate) fn validate_time_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] < 0.0 {
        return Err(Error::GridMismatch("time grid must be non-empty and start at t >= 0".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::GridMismatch("time grid must be strictly increasing".into()));
    }
    Ok(())
}
