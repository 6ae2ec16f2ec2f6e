use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::pde::{quantum_potential, DensityField};
use crate::special_math::trapezoid;

/// S_Q(x) = k_B[βQ(x, β) − ∫₀^β Q(x, β′)dβ′] at the last β node, with Q
/// the Bohm potential of each density and the β-integral by the trapezoid
/// rule over the supplied nodes.
pub fn quantum_entropy(rho_per_beta: &[DensityField], betas: &[f64], p: &PhysicalParams) -> Result<Vec<f64>> {
    if rho_per_beta.len() != betas.len() || betas.len() < 2 {
        return Err(Error::Config(format!(
            "need matching density and beta lists of length >= 2, got {} and {}",
            rho_per_beta.len(),
            betas.len()
        )));
    }
    if betas[0] != 0.0 || betas.windows(2).any(|w| !(w[1] > w[0])) || !betas.iter().all(|b| b.is_finite()) {
        return Err(Error::Config("beta nodes must start at 0 and increase".into()));
    }
    let grid = rho_per_beta[0].grid;
    if rho_per_beta.iter().any(|r| r.grid != grid) {
        return Err(Error::Config("densities at different beta nodes use different grids".into()));
    }
    let q: Vec<Vec<f64>> = rho_per_beta.iter().map(|r| quantum_potential(r, p).values).collect();
    let beta = *betas.last().unwrap();
    let last = q.last().unwrap();
    let mut column = vec![0.0; betas.len()];
    Ok((0..grid.n())
        .map(|i| {
            column.iter_mut().zip(&q).for_each(|(c, qb)| *c = qb[i]);
            p.k_b() * (beta * last[i] - trapezoid(betas, &column))
        })
        .collect())
}
