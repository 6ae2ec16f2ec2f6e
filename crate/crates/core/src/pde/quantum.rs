use crate::params::PhysicalParams;

use super::DensityField;

/// Density floor relative to the peak, applied before taking √ρ.
pub const RHO_FLOOR_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPotential {
    pub values: Vec<f64>,
    pub floor: f64,
    /// Fraction of nodes whose density sat below the floor.
    pub floored_fraction: f64,
}

/// Bohm potential Q = −ħ²(√ρ)″/(2m√ρ) by central differences, with
/// one-sided four-point stencils at the two ends.
pub fn quantum_potential(rho: &DensityField, p: &PhysicalParams) -> QuantumPotential {
    let mut values = vec![0.0; rho.rho.len()];
    let mut amplitude = vec![0.0; rho.rho.len()];
    let coef = p.hbar() * p.hbar() / (2.0 * p.mass());
    let (floor, floored) = fill(&rho.rho, rho.grid.h(), coef, false, &mut amplitude, &mut values);
    QuantumPotential {
        values,
        floor,
        floored_fraction: floored as f64 / rho.rho.len() as f64,
    }
}

/// Writes Q into `out` using `amp` as scratch for √ρ. With `periodic` the
/// last node is taken to duplicate the first. Returns the floor and the
/// number of floored nodes.
pub(crate) fn fill(
    rho: &[f64],
    h: f64,
    hbar2_over_2m: f64,
    periodic: bool,
    amp: &mut [f64],
    out: &mut [f64],
) -> (f64, usize) {
    let n = rho.len();
    let peak = rho.iter().copied().fold(0.0, f64::max);
    let floor = RHO_FLOOR_RELATIVE * peak;
    let mut floored = 0;
    for (a, &r) in amp.iter_mut().zip(rho) {
        if r < floor {
            floored += 1;
        }
        *a = r.max(floor).sqrt();
    }
    if peak == 0.0 {
        out.fill(0.0);
        return (floor, floored);
    }
    let scale = -hbar2_over_2m / (h * h);
    for i in 1..n - 1 {
        out[i] = scale * (amp[i - 1] - 2.0 * amp[i] + amp[i + 1]) / amp[i];
    }
    if periodic {
        let m = n - 1;
        out[0] = scale * (amp[m - 1] - 2.0 * amp[0] + amp[1]) / amp[0];
        out[m] = out[0];
    } else {
        out[0] = scale * (2.0 * amp[0] - 5.0 * amp[1] + 4.0 * amp[2] - amp[3]) / amp[0];
        out[n - 1] =
            scale * (2.0 * amp[n - 1] - 5.0 * amp[n - 2] + 4.0 * amp[n - 3] - amp[n - 4]) / amp[n - 1];
    }
    (floor, floored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};
    use crate::pde::Grid1D;
    use proptest::prelude::*;

    fn gradient_error(n: usize) -> f64 {
        let (mu, s2) = (0.2, 0.5);
        let grid = Grid1D::centered(mu, 6.0, n).unwrap();
        let rho = DensityField::gaussian(grid, mu, s2).unwrap();
        let q = quantum_potential(&rho, &PhysicalParams::natural()).values;
        let h = grid.h();
        // −∇Q = ħ²(x − μ)/(4mσ⁴) for a Gaussian
        let force = |x: f64| (x - mu) / (4.0 * s2 * s2);
        (1..n - 1)
            .filter(|&i| (grid.x(i) - mu).abs() <= 3.0 * s2.sqrt())
            .map(|i| (-(q[i + 1] - q[i - 1]) / (2.0 * h) - force(grid.x(i))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn gaussian_force_at_one_sigma() {
        let (mu, s2) = (0.0, 1.0);
        let grid = Grid1D::centered(mu, 10.0, 2001).unwrap();
        let rho = DensityField::gaussian(grid, mu, s2).unwrap();
        let q = quantum_potential(&rho, &PhysicalParams::natural()).values;
        let h = grid.h();
        let i = ((1.0 - grid.x_min()) / h).round() as usize;
        let force = -(q[i + 1] - q[i - 1]) / (2.0 * h);
        assert!((force - 0.25).abs() <= 1e-4, "{force}");
        let j = ((-1.0 - grid.x_min()) / h).round() as usize;
        assert!((-(q[j + 1] - q[j - 1]) / (2.0 * h) + 0.25).abs() <= 1e-4);
    }

    #[test]
    fn gaussian_values() {
        let (mu, s2) = (0.0, 0.7);
        let grid = Grid1D::centered(mu, 5.0, 1001).unwrap();
        let rho = DensityField::gaussian(grid, mu, s2).unwrap();
        let q = quantum_potential(&rho, &PhysicalParams::natural());
        for i in 0..grid.n() {
            let x = grid.x(i);
            if x.abs() <= 2.0 {
                let exact = (1.0 / (4.0 * s2)) * (1.0 - x * x / (2.0 * s2));
                assert!((q.values[i] - exact).abs() <= 1e-4, "x = {x}");
            }
        }
        assert_eq!(q.floored_fraction, 0.0);
    }

    #[test]
    fn second_order_convergence() {
        let e1 = gradient_error(401);
        let e2 = gradient_error(801);
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() <= 0.8, "{ratio}");
    }

    #[test]
    fn uniform_density_has_no_quantum_potential() {
        let grid = Grid1D::new(0.0, 3.0, 64).unwrap();
        let q = quantum_potential(&DensityField::uniform(grid), &PhysicalParams::natural());
        assert!(q.values.iter().all(|v| v.abs() <= 1e-9));
    }

    #[test]
    fn floor_keeps_tails_finite() {
        let grid = Grid1D::centered(0.0, 30.0, 601).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, 1.0).unwrap();
        let q = quantum_potential(&rho, &PhysicalParams::natural());
        assert!(q.values.iter().all(|v| v.is_finite()));
        assert!(q.floored_fraction > 0.5);
        assert!((q.floor - RHO_FLOOR_RELATIVE * rho.peak()).abs() <= 1e-25);
    }

    proptest! {
        #[test]
        fn scales_with_hbar_squared(hbar in 0.1..5.0f64, s2 in 0.2..2.0f64) {
            let grid = Grid1D::centered(0.0, 8.0, 201).unwrap();
            let rho = DensityField::gaussian(grid, 0.0, s2).unwrap();
            let base = quantum_potential(&rho, &PhysicalParams::natural()).values;
            let p = make_params(RawParams { hbar, ..Default::default() }).unwrap();
            let scaled = quantum_potential(&rho, &p).values;
            for (a, b) in base.iter().zip(&scaled) {
                prop_assert!((a * hbar * hbar - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn invariant_under_density_scaling(c in 0.01..100.0f64) {
            let grid = Grid1D::centered(0.0, 6.0, 121).unwrap();
            let rho = DensityField::gaussian(grid, 0.1, 0.8).unwrap();
            let scaled = DensityField::new(grid, rho.rho.iter().map(|r| r * c).collect()).unwrap();
            let p = PhysicalParams::natural();
            let a = quantum_potential(&rho, &p).values;
            let b = quantum_potential(&scaled, &p).values;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()));
            }
        }
    }
}
