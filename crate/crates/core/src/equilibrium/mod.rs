//! Equilibrium densities: imaginary-time propagation, the eigen-expansion
//! of the discretized Hamiltonian, the semiclassical formula, and the
//! quantum entropy.

mod entropy;
mod imaginary_time;
mod semiclassical;
mod spectral;
mod tridiagonal;

pub use entropy::quantum_entropy;
pub use imaginary_time::{imaginary_time_density, ImaginaryTimeConfig, ImaginaryTimeDensity, InitialProfile};
pub use semiclassical::semiclassical_density;
pub use spectral::{eigen_density, EigenDensity, SpectralDecomposition};

use crate::error::Result;
use crate::params::PhysicalParams;
use crate::pde::{Boundary, Grid1D, PotentialSpec};

/// Ĥ = −ħ²/2m ∂ₓ² + U on the active nodes: interior nodes with φ = 0 at
/// both ends for `Reflecting`, nodes 0..n−1 with wrap-around for `Periodic`.
/// Returns the diagonal and the constant off-diagonal.
pub(crate) fn hamiltonian(
    u: &PotentialSpec,
    p: &PhysicalParams,
    grid: &Grid1D,
    boundary: Boundary,
) -> Result<(Vec<f64>, f64)> {
    let [values, _, _] = u.derivatives(p, grid)?;
    let h = grid.h();
    let kinetic = p.hbar() * p.hbar() / (2.0 * p.mass() * h * h);
    let active = active_range(grid.n(), boundary);
    let diag = values[active].iter().map(|v| 2.0 * kinetic + v).collect();
    Ok((diag, -kinetic))
}

pub(crate) fn active_range(n: usize, boundary: Boundary) -> std::ops::Range<usize> {
    match boundary {
        Boundary::Reflecting => 1..n - 1,
        Boundary::Periodic => 0..n - 1,
    }
}

/// Spreads active-node values back onto the full grid.
pub(crate) fn to_full_grid(active: &[f64], n: usize, boundary: Boundary) -> Vec<f64> {
    let mut full = vec![0.0; n];
    match boundary {
        Boundary::Reflecting => full[1..n - 1].copy_from_slice(active),
        Boundary::Periodic => {
            full[..n - 1].copy_from_slice(active);
            full[n - 1] = active[0];
        }
    }
    full
}
