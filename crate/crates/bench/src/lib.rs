//! Fixtures shared by the benchmark targets.

use qbrown_core::{DensityField, Grid1D, PhysicalParams, RawParams};

/// Natural units with a unit harmonic trap.
pub fn harmonic_params(beta: f64) -> PhysicalParams {
    qbrown_core::make_params(RawParams {
        omega0: 1.0,
        temperature: 1.0 / beta,
        ..Default::default()
    })
    .expect("valid parameters")
}

/// Natural units at zero temperature with the given friction.
pub fn cold_params(friction: f64) -> PhysicalParams {
    qbrown_core::make_params(RawParams {
        temperature: 0.0,
        friction,
        ..Default::default()
    })
    .expect("valid parameters")
}

/// Centred Gaussian on a symmetric grid.
pub fn gaussian(half_width: f64, n: usize, sigma2: f64) -> DensityField {
    let grid = Grid1D::centered(0.0, half_width, n).expect("valid grid");
    DensityField::gaussian(grid, 0.0, sigma2).expect("valid density")
}
