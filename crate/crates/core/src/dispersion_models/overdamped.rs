use crate::error::{Error, Result};
use crate::params::{derived_scales, PhysicalParams};
use crate::special_math::{fixed_point, solve_ode, CumulativeQuadrature, OdeSolverConfig, QuadratureScheme};

use super::closed_form::{eval_closed_form, ClosedFormKind};
use super::{beta_index, validate_beta_grid, validate_time_grid, BetaGridFunction, DispersionTrajectory};

/// `[0]` followed by `per_decade` log-spaced times per decade on
/// [t_min, t_max], both ends included.
pub fn log_time_grid(t_min: f64, t_max: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t_max / t_min).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    let mut grid = vec![0.0];
    grid.extend((0..=n).map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64)));
    grid
}

/// β grid for the high-friction self-consistent solve: 0, then a geometric
/// ladder with 16 nodes per decade from 10⁻⁵β up to the physical β, then on
/// to 8β where the quantum term dominates.
pub fn default_beta_grid(p: &PhysicalParams) -> Result<Vec<f64>> {
    let beta = p
        .beta()
        .ok_or_else(|| Error::Config("the beta grid needs T > 0".into()))?;
    let mut grid = vec![0.0];
    grid.extend((-80..=14).map(|k| beta * 10f64.powf(k as f64 / 16.0)));
    grid.push(8.0 * beta);
    Ok(grid)
}

/// ∂ₜσ² = 2D(1 + λ_T²/σ²) from σ²(0) = `sigma2_0`.
///
/// With σ²(0) = 0 the equation is singular at the origin; the solution then
/// starts from the exact value at the first positive grid time.
pub fn solve_overdamped_bounded(
    p: &PhysicalParams,
    sigma2_0: f64,
    t_grid: &[f64],
    cfg: &OdeSolverConfig,
) -> Result<DispersionTrajectory> {
    let s = derived_scales(p)?;
    validate_time_grid(t_grid)?;
    if !(sigma2_0 >= 0.0) || !sigma2_0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "initial sigma2",
            requirement: "non-negative",
        });
    }
    let (d, l2) = (s.diffusion, s.lambda_t * s.lambda_t);
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| dy[0] = 2.0 * d * (1.0 + l2 / y[0]);

    let mut values = Vec::with_capacity(t_grid.len());
    let (start, y0, grid): (usize, f64, Vec<f64>) = if sigma2_0 == 0.0 {
        let first = t_grid.iter().position(|&t| t > 0.0);
        values.extend(t_grid.iter().take_while(|&&t| t == 0.0).map(|_| 0.0));
        match first {
            None => return DispersionTrajectory::new("overdamped_bounded", t_grid.to_vec(), values, None, p),
            Some(i) => {
                let y0 = eval_closed_form(ClosedFormKind::LambertExact, t_grid[i], p)?.value;
                (i, y0, t_grid[i..].to_vec())
            }
        }
    } else if t_grid[0] == 0.0 {
        (0, sigma2_0, t_grid.to_vec())
    } else {
        (0, sigma2_0, std::iter::once(0.0).chain(t_grid.iter().copied()).collect())
    };
    let sol = solve_ode(rhs, &[y0], &grid, cfg)?;
    let skip = grid.len() - (t_grid.len() - start);
    values.extend(sol.states[skip..].iter().map(|y| y[0]));
    DispersionTrajectory::new("overdamped_bounded", t_grid.to_vec(), values, None, p)
}

/// How the unknown enters the right-hand side during the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PicardConvention {
    /// The outer σ² factor stays the current unknown. Marches level by
    /// level in time and solves each level exactly up the β ladder, so the
    /// relaxation settings are not used.
    OuterUnknown,
    /// The previous iterate fills the whole right-hand side; every sweep
    /// regenerates the entire surface from the superposition start.
    ExplicitSubstitution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub theta: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Rule for the time integral. β-integrals always use the trapezoid
    /// rule: the march recovers each node's sample from its running
    /// integral, and the Simpson weights amplify errors under that inversion.
    pub scheme: QuadratureScheme,
    pub convention: PicardConvention,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            theta: 0.7,
            tol: 1e-8,
            max_iter: 200,
            scheme: QuadratureScheme::Simpson,
            convention: PicardConvention::OuterUnknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverdampedFull {
    pub surface: BetaGridFunction,
    /// Column at the physical β.
    pub trajectory: DispersionTrajectory,
    pub physical_index: usize,
    /// Time levels solved (marching) or map evaluations (global).
    pub iterations: usize,
    /// Relative level residual of every time level (marching) or the change
    /// after every sweep (global).
    pub residuals: Vec<f64>,
}

/// Self-consistent high-friction equation for a free particle,
///
/// ∂ₜσ² = 2D(1 + σ² ∫₀^β ħ²/(4mσ⁴) dβ'),
///
/// with D and λ_T taken at each β node and b fixed. In integral form
/// σ²(t) = 2Dt + 2D∫₀ᵗ σ²J dt'; the time integral is done in u = √t,
/// where the integrand stays finite as t → 0, and the first panel
/// [0, t₁] uses ∫ ≈ 2t₁F(t₁) from the √t onset.
pub fn solve_overdamped_full(
    p: &PhysicalParams,
    t_grid: &[f64],
    beta_grid: &[f64],
    cfg: &PicardConfig,
) -> Result<OverdampedFull> {
    derived_scales(p)?;
    validate_time_grid(t_grid)?;
    validate_beta_grid(beta_grid)?;
    if t_grid[0] != 0.0 || t_grid.len() < 2 {
        return Err(Error::GridMismatch("time grid must start at 0 and hold a positive time".into()));
    }
    let beta = p.beta().expect("checked by derived_scales");
    let physical_index = beta_index(beta_grid, beta)
        .ok_or_else(|| Error::GridMismatch(format!("beta grid lacks the physical beta {beta}")))?;

    let problem = Problem::new(p, t_grid, beta_grid, cfg.scheme)?;
    let (values, iterations, residuals) = match cfg.convention {
        PicardConvention::OuterUnknown => problem.march()?,
        PicardConvention::ExplicitSubstitution => problem.global(cfg)?,
    };

    let mut rows = Vec::with_capacity(t_grid.len());
    rows.push(vec![0.0; beta_grid.len()]);
    for row in values {
        let mut full = vec![f64::INFINITY];
        full.extend(row);
        rows.push(full);
    }
    let column: Vec<f64> = rows.iter().map(|r| r[physical_index]).collect();
    let trajectory = DispersionTrajectory::new("overdamped_full", t_grid.to_vec(), column, None, p)?;
    Ok(OverdampedFull {
        surface: BetaGridFunction {
            t_grid: t_grid.to_vec(),
            beta_grid: beta_grid.to_vec(),
            values: rows,
        },
        trajectory,
        physical_index,
        iterations,
        residuals,
    })
}

struct Problem {
    /// positive times t₁ … t_N
    times: Vec<f64>,
    /// u_i = √t_i
    roots: Vec<f64>,
    /// D per positive β node
    diffusion: Vec<f64>,
    /// ħ²/(4m)
    c: f64,
    beta_quad: CumulativeQuadrature,
    time_quad: CumulativeQuadrature,
    superposition: Vec<Vec<f64>>,
}

type Surface = Vec<Vec<f64>>;

impl Problem {
    fn new(p: &PhysicalParams, t_grid: &[f64], beta_grid: &[f64], scheme: QuadratureScheme) -> Result<Self> {
        let times = t_grid[1..].to_vec();
        let roots: Vec<f64> = times.iter().map(|t| t.sqrt()).collect();
        let b = p.friction();
        let diffusion: Vec<f64> = beta_grid[1..].iter().map(|bj| 1.0 / (bj * b)).collect();
        let mut superposition = Vec::with_capacity(times.len());
        for &t in &times {
            let mut row = Vec::with_capacity(diffusion.len());
            for &bj in &beta_grid[1..] {
                let pj = p.at_beta(bj)?;
                row.push(eval_closed_form(ClosedFormKind::Superposition, t, &pj)?.value);
            }
            superposition.push(row);
        }
        Ok(Problem {
            times,
            c: p.hbar() * p.hbar() / (4.0 * p.mass()),
            diffusion,
            beta_quad: CumulativeQuadrature::new(beta_grid, QuadratureScheme::Trapezoid)?,
            time_quad: CumulativeQuadrature::new(&roots, scheme)?,
            roots,
            superposition,
        })
    }

    /// J_j = ∫₀^{β_j} ħ²/(4mσ⁴) dβ' for a profile over the positive nodes.
    fn beta_integrals(&self, profile: &[f64], g: &mut [f64], out: &mut [f64]) {
        g[0] = 0.0;
        for (gj, s) in g[1..].iter_mut().zip(profile) {
            *gj = self.c / (s * s);
        }
        self.beta_quad.apply_into(g, out);
    }

    fn check_positive(&self, level: usize, profile: &[f64]) -> Result<()> {
        if profile.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::NonPhysical {
                context: "high-friction self-consistent solve",
                t: self.times[level],
                detail: "sigma2 became non-positive; refine the time or beta grid".into(),
            });
        }
        Ok(())
    }

    /// Level-by-level solve. At each time level the row is found by
    /// climbing the β ladder: node j solves
    ///
    /// s = A + B·s·(P + w·c/s²)
    ///
    /// for s, where P holds the β-integral over nodes below j and w is the
    /// node's own quadrature weight. `integrand[i][j]` stores G = 2u·σ²·J.
    fn march(&self) -> Result<(Surface, usize, Vec<f64>)> {
        let nb = self.diffusion.len();
        let nt = self.times.len();
        let mut values: Surface = Vec::with_capacity(nt);
        let mut integrand: Surface = Vec::with_capacity(nt);
        // running time integrals over [u₁, u_i] per β node
        let mut running: Surface = Vec::with_capacity(nt);
        let mut residuals = Vec::with_capacity(nt);
        let mut g = vec![0.0; nb + 1];
        let mut beta_running = vec![0.0; nb + 1];

        for i in 0..nt {
            let t = self.times[i];
            let u = self.roots[i];
            let weight = if i == 0 { u } else { self.time_quad.self_weight(i) };
            let mut row = vec![0.0; nb];
            g[0] = 0.0;
            beta_running[0] = 0.0;
            for j in 0..nb {
                let known = if i == 0 {
                    0.0
                } else {
                    let base = self.time_quad.base(i);
                    let mut acc = self.roots[0] * integrand[0][j] + running[base][j];
                    for &(k, w) in self.time_quad.local(i) {
                        if k != i {
                            acc += w * integrand[k][j];
                        }
                    }
                    acc
                };
                let d2 = 2.0 * self.diffusion[j];
                let a = d2 * (t + known);
                let b = d2 * weight * 2.0 * u;
                let node = j + 1;
                let partial = self.beta_quad.partial(node, &beta_running, &g);
                let w = self.beta_quad.self_weight(node);
                let s = self.node_root(i, a, 1.0 - b * partial, b * w * self.c)?;
                row[j] = s;
                g[node] = self.c / (s * s);
                beta_running[node] = partial + w * g[node];
            }

            // level residual of the assembled row
            let mut integral = vec![0.0; nb + 1];
            self.beta_integrals(&row, &mut g, &mut integral);
            let mut worst: f64 = 0.0;
            let row_g: Vec<f64> = (0..nb).map(|j| 2.0 * u * row[j] * integral[j + 1]).collect();
            let mut row_running = vec![0.0; nb];
            if i > 0 {
                let base = self.time_quad.base(i);
                for (j, r) in row_running.iter_mut().enumerate() {
                    *r = running[base][j]
                        + self
                            .time_quad
                            .local(i)
                            .iter()
                            .filter(|(k, _)| *k != i)
                            .map(|&(k, w)| w * integrand[k][j])
                            .sum::<f64>()
                        + self.time_quad.self_weight(i) * row_g[j];
                }
            }
            for j in 0..nb {
                let total = if i == 0 { u * row_g[j] } else { self.roots[0] * integrand[0][j] + row_running[j] };
                let rhs = 2.0 * self.diffusion[j] * (t + total);
                worst = worst.max((rhs - row[j]).abs() / row[j]);
            }
            residuals.push(worst);
            integrand.push(row_g);
            running.push(row_running);
            values.push(row);
        }
        Ok((values, nt, residuals))
    }

    /// Larger root of m·s² − a·s − q = 0.
    fn node_root(&self, level: usize, a: f64, m: f64, q: f64) -> Result<f64> {
        let disc = a * a + 4.0 * m * q;
        if !(m > 0.0) || !(disc >= 0.0) {
            return Err(Error::NonPhysical {
                context: "high-friction self-consistent solve",
                t: self.times[level],
                detail: "no positive sigma2 at a beta node; refine the time or beta grid".into(),
            });
        }
        Ok((a + disc.sqrt()) / (2.0 * m))
    }

    /// Whole-surface substitution sweeps from the superposition start. The
    /// iterate is σ² divided by that start, so the relative-change test sees
    /// cold and hot columns alike.
    fn global(&self, cfg: &PicardConfig) -> Result<(Surface, usize, Vec<f64>)> {
        let nb = self.diffusion.len();
        let nt = self.times.len();
        let scale: Vec<f64> = self.superposition.iter().flatten().copied().collect();
        let map = |ratio: &[f64]| -> Result<Vec<f64>> {
            let flat: Vec<f64> = ratio.iter().zip(&scale).map(|(r, s)| r * s).collect();
            let mut g = vec![0.0; nb + 1];
            let mut integral = vec![0.0; nb + 1];
            let mut integrand = vec![vec![0.0; nt]; nb];
            for i in 0..nt {
                let row = &flat[i * nb..(i + 1) * nb];
                self.check_positive(i, row)?;
                self.beta_integrals(row, &mut g, &mut integral);
                for j in 0..nb {
                    integrand[j][i] = 2.0 * self.roots[i] * row[j] * integral[j + 1];
                }
            }
            let mut out = vec![0.0; nt * nb];
            for (j, column) in integrand.iter().enumerate() {
                let running = self.time_quad.apply(column);
                let first = self.roots[0] * column[0];
                let d2 = 2.0 * self.diffusion[j];
                for i in 0..nt {
                    let k = i * nb + j;
                    out[k] = d2 * (self.times[i] + first + running[i]) / scale[k];
                }
            }
            Ok(out)
        };
        let fp = fixed_point(map, vec![1.0; nt * nb], cfg.theta, cfg.tol, cfg.max_iter)?;
        let values = fp
            .value
            .chunks(nb)
            .zip(scale.chunks(nb))
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a * b).collect())
            .collect();
        Ok((values, fp.iterations, fp.residuals))
    }
}
