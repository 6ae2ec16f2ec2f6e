use crate::error::{Error, Result};
use crate::params::PhysicalParams;

use super::Grid1D;

/// External potential acting on the particle.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// U = −f·x
    Linear { force: f64 },
    /// U = mω₀²x²/2
    Harmonic { omega0: f64 },
    /// U = k₄x⁴
    Quartic { k4: f64 },
    /// Node values; derivatives by finite differences.
    Tabulated(Vec<f64>),
}

impl PotentialSpec {
    /// Linear when the params carry a force, harmonic when they carry ω₀,
    /// free otherwise. Both at once is not representable.
    pub fn from_params(p: &PhysicalParams) -> Result<Self> {
        match (p.force() != 0.0, p.omega0() > 0.0) {
            (true, true) => Err(Error::Config(
                "force and omega0 cannot both be set for a single potential".into(),
            )),
            (true, false) => Ok(PotentialSpec::Linear { force: p.force() }),
            (false, true) => Ok(PotentialSpec::Harmonic { omega0: p.omega0() }),
            (false, false) => Ok(PotentialSpec::Free),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PotentialSpec::Free => "free",
            PotentialSpec::Linear { .. } => "linear",
            PotentialSpec::Harmonic { .. } => "harmonic",
            PotentialSpec::Quartic { .. } => "quartic",
            PotentialSpec::Tabulated(_) => "tabulated",
        }
    }

    pub fn validate(&self, p: &PhysicalParams, grid: &Grid1D) -> Result<()> {
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Linear { force } if force.is_finite() => Ok(()),
            PotentialSpec::Linear { .. } => Err(Error::InvalidParameter {
                name: "force",
                requirement: "finite",
            }),
            PotentialSpec::Harmonic { omega0 } => {
                if !(*omega0 > 0.0) || !omega0.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "omega0",
                        requirement: "positive and finite",
                    });
                }
                if p.omega0() > 0.0 && (p.omega0() - omega0).abs() > 1e-12 * omega0 {
                    return Err(Error::Config(format!(
                        "harmonic potential omega0 = {omega0} disagrees with params omega0 = {}",
                        p.omega0()
                    )));
                }
                Ok(())
            }
            PotentialSpec::Quartic { k4 } if k4.is_finite() && *k4 >= 0.0 => Ok(()),
            PotentialSpec::Quartic { .. } => Err(Error::InvalidParameter {
                name: "k4",
                requirement: "non-negative and finite",
            }),
            PotentialSpec::Tabulated(values) => {
                if values.len() != grid.n() {
                    return Err(Error::GridMismatch(format!(
                        "{} tabulated potential values for {} nodes",
                        values.len(),
                        grid.n()
                    )));
                }
                match values.iter().position(|v| !v.is_finite()) {
                    Some(i) => Err(Error::NonFinite {
                        context: "tabulated potential",
                        location: grid.x(i),
                    }),
                    None => Ok(()),
                }
            }
        }
    }

    /// U, U′ and U″ at every node.
    pub fn derivatives(&self, p: &PhysicalParams, grid: &Grid1D) -> Result<[Vec<f64>; 3]> {
        self.validate(p, grid)?;
        let x = grid.nodes();
        let map = |f: &dyn Fn(f64) -> f64| x.iter().map(|&x| f(x)).collect::<Vec<f64>>();
        Ok(match self {
            PotentialSpec::Free => [vec![0.0; x.len()], vec![0.0; x.len()], vec![0.0; x.len()]],
            PotentialSpec::Linear { force } => {
                [map(&|x| -force * x), vec![-force; x.len()], vec![0.0; x.len()]]
            }
            PotentialSpec::Harmonic { omega0 } => {
                let k = p.mass() * omega0 * omega0;
                [map(&|x| 0.5 * k * x * x), map(&|x| k * x), vec![k; x.len()]]
            }
            PotentialSpec::Quartic { k4 } => [
                map(&|x| k4 * x.powi(4)),
                map(&|x| 4.0 * k4 * x.powi(3)),
                map(&|x| 12.0 * k4 * x * x),
            ],
            PotentialSpec::Tabulated(u) => {
                let (d1, d2) = finite_differences(u, grid.h());
                [u.clone(), d1, d2]
            }
        })
    }
}

/// Second-order central differences, second-order one-sided at the ends.
fn finite_differences(u: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = u.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        d1[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        d2[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    }
    d1[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    d1[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    d2[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
    d2[n - 1] = (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / (h * h);
    (d1, d2)
}

/// U_eff = U + βħ²[3U″ − β(U′)²]/(24m) at every node.
pub fn effective_potential(
    u: &PotentialSpec,
    beta: f64,
    p: &PhysicalParams,
    grid: &Grid1D,
) -> Result<Vec<f64>> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "beta",
            requirement: "positive and finite",
        });
    }
    let [u0, d1, d2] = u.derivatives(p, grid)?;
    let c = beta * p.hbar() * p.hbar() / (24.0 * p.mass());
    Ok(u0
        .iter()
        .zip(d1.iter().zip(&d2))
        .map(|(u, (g, l))| u + c * (3.0 * l - beta * g * g))
        .collect())
}
