//! Quantum Brownian motion: dispersion laws, Smoluchowski and telegraph
//! density solvers with the Bohm quantum potential, and equilibrium
//! densities from imaginary-time propagation.
//!
//! ```
//! use qbrown_core::{derived_scales, eval_closed_form, ClosedFormKind, PhysicalParams};
//!
//! let p = PhysicalParams::natural();
//! let s = derived_scales(&p).unwrap();
//! let sigma2 = eval_closed_form(ClosedFormKind::LambertExact, 100.0 * s.t_c, &p).unwrap().value;
//! assert!(sigma2 > 2.0 * s.diffusion * 100.0 * s.t_c);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dispersion_models;
pub mod equilibrium;
pub mod error;
pub mod params;
pub mod pde;
pub mod special_math;

pub use dispersion_models::{
    compare_models, eval_closed_form, solve_harmonic, solve_inertial_zero_t, solve_overdamped_bounded,
    solve_overdamped_full, stationary_harmonic_dispersion, BetaGridFunction, ClosedFormKind, ClosedFormValue,
    ComparisonTable, DispersionTrajectory, HarmonicInit, InertialInit, ModelSpec, PicardConfig, PicardConvention,
};
pub use equilibrium::{
    eigen_density, imaginary_time_density, quantum_entropy, semiclassical_density, EigenDensity,
    ImaginaryTimeConfig, ImaginaryTimeDensity, InitialProfile, SpectralDecomposition,
};
pub use error::{Error, Result, Warning};
pub use params::{derived_scales, make_params, momentum_dispersion, DerivedScales, PhysicalParams, RawParams};
pub use pde::{
    effective_potential, evolve, free_grid, max_stable_dt, moments, quantum_potential, Boundary, DensityField, EvolveSpec, Evolution,
    FluxAssembly, Grid1D, MomentTrajectory, Moments, PdeModel, PotentialSpec,
};
pub use special_math::{
    coth, fixed_point, integrate_beta, lambert_w_minus1, solve_ode, OdeMethod, OdeSolverConfig, QuadratureRule,
    QuadratureScheme,
};
