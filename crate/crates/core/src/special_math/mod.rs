//! Numerical kernels: Lambert W₋₁, coth, β-quadrature, ODE integration and
//! a relaxed fixed-point driver.

mod fixed_point;
mod lambert;
mod ode;
mod quadrature;

pub use fixed_point::{fixed_point, relative_change, FixedPoint};
pub use lambert::{lambert_w_minus1, BRANCH_POINT};
pub use ode::{solve_ode, OdeMethod, OdeSolution, OdeSolverConfig};
pub use quadrature::{
    integrate_beta, simpson, trapezoid, CumulativeQuadrature, QuadratureRule, QuadratureScheme,
};

use crate::error::{Error, Result};

/// Hyperbolic cotangent, stable near zero and for large arguments.
pub fn coth(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(Error::Domain {
            function: "coth",
            value: x,
            domain: "x != 0",
        });
    }
    let a = x.abs();
    Ok(if a < 1e-8 {
        1.0 / x + x / 3.0
    } else if a > 20.0 {
        x.signum()
    } else {
        1.0 / x.tanh()
    })
}
