use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::pde::{effective_potential, DensityField, Grid1D, PotentialSpec};

/// ρ ∝ exp(−βU_eff) with U_eff = U + βħ²[3U″ − β(U′)²]/(24m), normalized on
/// the grid. The largest exponent is subtracted before exponentiating.
pub fn semiclassical_density(
    u: &PotentialSpec,
    p: &PhysicalParams,
    beta: f64,
    grid: Grid1D,
) -> Result<DensityField> {
    let ueff = effective_potential(u, beta, p, &grid)?;
    let exponent: Vec<f64> = ueff.iter().map(|v| -beta * v).collect();
    let top = exponent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::NonFinite {
            context: "semiclassical exponent",
            location: beta,
        });
    }
    let rho = exponent.iter().map(|e| (e - top).exp()).collect();
    let mut field = DensityField::new(grid, rho)?;
    field.normalize()?;
    Ok(field)
}
