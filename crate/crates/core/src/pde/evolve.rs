use crate::error::{Error, Result};
use crate::params::PhysicalParams;

use super::potential::PotentialSpec;
use super::quantum::{self, RHO_FLOOR_RELATIVE};
use super::{moments, DensityField, Grid1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Zero total flux through both ends.
    #[default]
    Reflecting,
    /// The last node duplicates the first.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdeModel {
    ClassicalTelegraph,
    ClassicalSmoluchowski,
    SemiclassicalTelegraph,
    SemiclassicalSmoluchowski,
    QuantumZeroTTelegraph,
    QuantumZeroTSmoluchowski,
}

impl PdeModel {
    pub const ALL: [PdeModel; 6] = [
        PdeModel::ClassicalTelegraph,
        PdeModel::ClassicalSmoluchowski,
        PdeModel::SemiclassicalTelegraph,
        PdeModel::SemiclassicalSmoluchowski,
        PdeModel::QuantumZeroTTelegraph,
        PdeModel::QuantumZeroTSmoluchowski,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            PdeModel::ClassicalTelegraph => "classical_telegraph",
            PdeModel::ClassicalSmoluchowski => "classical_smoluchowski",
            PdeModel::SemiclassicalTelegraph => "semiclassical_telegraph",
            PdeModel::SemiclassicalSmoluchowski => "semiclassical_smoluchowski",
            PdeModel::QuantumZeroTTelegraph => "quantum_zero_t_telegraph",
            PdeModel::QuantumZeroTSmoluchowski => "quantum_zero_t_smoluchowski",
        }
    }

    pub fn is_telegraph(&self) -> bool {
        matches!(
            self,
            PdeModel::ClassicalTelegraph | PdeModel::SemiclassicalTelegraph | PdeModel::QuantumZeroTTelegraph
        )
    }

    pub fn is_semiclassical(&self) -> bool {
        matches!(self, PdeModel::SemiclassicalTelegraph | PdeModel::SemiclassicalSmoluchowski)
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, PdeModel::QuantumZeroTTelegraph | PdeModel::QuantumZeroTSmoluchowski)
    }

    pub fn validate(&self, p: &PhysicalParams) -> Result<()> {
        if self.is_quantum() && !p.is_zero_temperature() {
            return Err(Error::Config(format!("{} requires T = 0", self.label())));
        }
        if !self.is_quantum() && p.is_zero_temperature() {
            return Err(Error::Config(format!("{} requires T > 0", self.label())));
        }
        if !self.is_telegraph() && !(p.friction() > 0.0) {
            return Err(Error::InvalidParameter {
                name: "friction",
                requirement: "positive for Smoluchowski models",
            });
        }
        Ok(())
    }
}

/// How the semiclassical drift is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxAssembly {
    /// ρ∇U_eff
    #[default]
    EffectivePotential,
    /// ρ∇(U + βħ²ΔU/24m) + βħ²∇·(ρ∇∇U)/12m, valid near equilibrium.
    PositionDependentDiffusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub model: PdeModel,
    pub potential: PotentialSpec,
    pub t_final: f64,
    /// None picks `max_stable_dt`.
    pub dt: Option<f64>,
    pub boundary: Boundary,
    /// Moments are recorded every this many steps and at the end.
    pub record_every: usize,
    pub flux: FluxAssembly,
}

impl EvolveSpec {
    pub fn new(model: PdeModel, potential: PotentialSpec, t_final: f64) -> Self {
        EvolveSpec {
            model,
            potential,
            t_final,
            dt: None,
            boundary: Boundary::Reflecting,
            record_every: 1,
            flux: FluxAssembly::EffectivePotential,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub dispersion: Vec<f64>,
    pub norm: Vec<f64>,
}

impl MomentTrajectory {
    fn record(&mut self, t: f64, rho: &DensityField) {
        let m = moments(rho);
        self.times.push(t);
        self.mean.push(m.mean);
        self.dispersion.push(m.dispersion);
        self.norm.push(m.norm);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub density: DensityField,
    pub moments: MomentTrajectory,
    pub steps: usize,
    pub dt: f64,
    /// max over steps of |mass − initial mass|
    pub max_mass_error: f64,
    /// min over steps of min ρ / peak ρ
    pub min_relative_density: f64,
    /// Largest fraction of floored nodes seen in Q (quantum models only).
    pub max_floored_fraction: f64,
    /// Face updates cut back by the positivity limiter, summed over steps.
    pub limited_faces: usize,
    pub rho_floor_relative: f64,
}

/// Face fluxes F with ∂ₜρ = ∂ₓF/b in the overdamped limit. Classical and
/// semiclassical drift uses the exponentially fitted flux
///
/// F = (k_BT/h)[B(−Δ)ρ_{f+1} − B(Δ)ρ_f],  Δ = h∂ₓΦ/k_BT,  B(x) = x/(eˣ − 1),
///
/// which is non-negative in its neighbour, leaves e^{−Φ/k_BT} stationary and
/// reduces to ρ̄∂ₓΦ + k_BT∂ₓρ for small Δ. The Bohm drift at T = 0 uses the
/// face average ρ̄∂ₓ(U + Q).
struct Operator {
    n: usize,
    h: f64,
    periodic: bool,
    /// F_f = upper[f]·ρ_{f+1} − lower[f]·ρ_f for the static models
    upper: Vec<f64>,
    lower: Vec<f64>,
    /// static ∂ₓU at faces (quantum models)
    grad: Vec<f64>,
    /// ħ²/2m when Q is part of Φ
    quantum: Option<f64>,
    inv_w: Vec<f64>,
    q: Vec<f64>,
    amp: Vec<f64>,
}

/// x/(eˣ − 1)
fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

impl Operator {
    fn new(rho0: &DensityField, spec: &EvolveSpec, p: &PhysicalParams) -> Result<Self> {
        spec.model.validate(p)?;
        let grid = rho0.grid;
        let (n, h) = (grid.n(), grid.h());
        let [u, _, d2] = spec.potential.derivatives(p, &grid)?;
        let m = p.mass();
        let hbar2 = p.hbar() * p.hbar();
        let (phi, pdd) = if spec.model.is_semiclassical() {
            let beta = p.beta().ok_or(Error::ScalesUndefined("beta at T = 0"))?;
            match spec.flux {
                FluxAssembly::EffectivePotential => {
                    (super::effective_potential(&spec.potential, beta, p, &grid)?, None)
                }
                FluxAssembly::PositionDependentDiffusion => {
                    let c = beta * hbar2 / (24.0 * m);
                    let phi = u.iter().zip(&d2).map(|(u, l)| u + c * l).collect();
                    (phi, Some(d2.iter().map(|l| 2.0 * c * l).collect::<Vec<f64>>()))
                }
            }
        } else {
            if spec.flux == FluxAssembly::PositionDependentDiffusion {
                return Err(Error::Config(
                    "position-dependent diffusion applies to semiclassical models only".into(),
                ));
            }
            (u, None)
        };
        let grad: Vec<f64> = phi.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        let (mut upper, mut lower) = (vec![0.0; n - 1], vec![0.0; n - 1]);
        if !spec.model.is_quantum() {
            let kt = p.thermal_energy();
            for (f, g) in grad.iter().enumerate() {
                let delta = h * g / kt;
                upper[f] = kt / h * bernoulli(-delta);
                lower[f] = kt / h * bernoulli(delta);
            }
        }
        if let Some(c) = &pdd {
            for f in 0..n - 1 {
                upper[f] += c[f + 1] / h;
                lower[f] += c[f] / h;
            }
        }
        let periodic = spec.boundary == Boundary::Periodic;
        let inv_w = if periodic {
            vec![1.0 / h; n]
        } else {
            grid.trapezoid_weights().iter().map(|w| 1.0 / w).collect()
        };
        Ok(Operator {
            n,
            h,
            periodic,
            upper,
            lower,
            grad,
            quantum: spec.model.is_quantum().then_some(hbar2 / (2.0 * m)),
            inv_w,
            q: vec![0.0; n],
            amp: vec![0.0; n],
        })
    }

    /// Faces to the left and right of node i.
    fn faces(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let n = self.n;
        let left = match i {
            0 if self.periodic => Some(n - 2),
            0 => None,
            _ => Some(i - 1),
        };
        (left, (i < n - 1).then_some(i))
    }

    /// Upper bound on the spectral radius of ∂ₓF, used for the step bound.
    fn stiffness(&mut self, rho: &[f64], p: &PhysicalParams) -> f64 {
        let h = self.h;
        match self.quantum {
            Some(coef) => {
                quantum::fill(rho, h, coef, self.periodic, &mut self.amp, &mut self.q);
                let max_grad = self
                    .q
                    .windows(2)
                    .zip(&self.grad)
                    .map(|(w, g)| ((w[1] - w[0]) / h + g).abs())
                    .fold(0.0, f64::max);
                4.0 * p.hbar() * p.hbar() / (p.mass() * h.powi(4)) + 2.0 * max_grad / h
            }
            None => (0..self.n)
                .map(|i| {
                    let (left, right) = self.faces(i);
                    let mut row = 0.0;
                    if let Some(f) = left {
                        row += self.upper[f].abs() + self.lower[f].abs();
                    }
                    if let Some(f) = right {
                        row += self.upper[f].abs() + self.lower[f].abs();
                    }
                    row * self.inv_w[i]
                })
                .fold(0.0, f64::max),
        }
    }

    /// Writes the face fluxes into `flux`; returns the number of floored
    /// nodes in Q.
    fn fluxes(&mut self, rho: &[f64], flux: &mut [f64]) -> usize {
        let h = self.h;
        match self.quantum {
            Some(coef) => {
                let floored = quantum::fill(rho, h, coef, self.periodic, &mut self.amp, &mut self.q).1;
                for (f, out) in flux.iter_mut().enumerate() {
                    let g = self.grad[f] + (self.q[f + 1] - self.q[f]) / h;
                    *out = 0.5 * (rho[f] + rho[f + 1]) * g;
                }
                floored
            }
            None => {
                for (f, out) in flux.iter_mut().enumerate() {
                    *out = self.upper[f] * rho[f + 1] - self.lower[f] * rho[f];
                }
                0
            }
        }
    }

    /// Scales down the fluxes leaving any node that would lose more than
    /// it holds during `dt`; returns the number of faces touched.
    fn limit(&self, rho: &[f64], dt: f64, flux: &mut [f64]) -> usize {
        let active = if self.periodic { self.n - 1 } else { self.n };
        let mut scale = vec![1.0; active];
        for (i, s) in scale.iter_mut().enumerate() {
            let (left, right) = self.faces(i);
            let mut out = 0.0;
            if let Some(f) = left {
                out += flux[f].max(0.0);
            }
            if let Some(f) = right {
                out += (-flux[f]).max(0.0);
            }
            let out = dt * out * self.inv_w[i];
            if out > rho[i] {
                *s = rho[i].max(0.0) / out;
            }
        }
        let mut touched = 0;
        for (f, value) in flux.iter_mut().enumerate() {
            let donor = if *value < 0.0 { f } else { (f + 1) % active };
            if scale[donor] < 1.0 {
                *value *= scale[donor];
                touched += 1;
            }
        }
        touched
    }

    /// ρ += dt·∂ₓF node by node.
    fn advance(&self, rho: &mut [f64], dt: f64, flux: &[f64]) {
        let n = self.n;
        let active = if self.periodic { n - 1 } else { n };
        for i in 0..active {
            let (left, right) = self.faces(i);
            let div = right.map_or(0.0, |f| flux[f]) - left.map_or(0.0, |f| flux[f]);
            rho[i] += dt * div * self.inv_w[i];
        }
        if self.periodic {
            rho[n - 1] = rho[0];
        }
    }
}

const DT_SAFETY: f64 = 0.8;

/// Largest step the explicit scheme accepts for this setup, including the
/// 0.8 safety factor. Smoluchowski steps obey dt·K/b ≤ 2; the staggered
/// telegraph step obeys dt²K/m ≤ 4.
pub fn max_stable_dt(rho0: &DensityField, spec: &EvolveSpec, p: &PhysicalParams) -> Result<f64> {
    let mut op = Operator::new(rho0, spec, p)?;
    Ok(DT_SAFETY * stability_limit(op.stiffness(&rho0.rho, p), spec.model, p))
}

fn stability_limit(k: f64, model: PdeModel, p: &PhysicalParams) -> f64 {
    let (m, b) = (p.mass(), p.friction());
    if model.is_telegraph() {
        2.0 * (m / k).sqrt()
    } else {
        2.0 * b / k
    }
}

/// Advances ρ under the chosen model from rest (∂ₜρ = 0 at t = 0).
///
/// The telegraph models carry the face flux J as the second field,
/// ∂ₜρ = ∂ₓJ with m∂ₜJ + bJ = F, which is m∂ₜ²ρ + b∂ₜρ = ∂ₓF. J sits at
/// half steps (leapfrog) with the friction averaged across each step. Fluxes that
/// would drive a node negative are scaled back to empty it exactly, so mass
/// is conserved and ρ stays non-negative. The run aborts when the mass moves
/// by more than 1e-8 or ρ dips below −1e-12 of its peak.
pub fn evolve(rho0: &DensityField, spec: &EvolveSpec, p: &PhysicalParams) -> Result<Evolution> {
    if !(spec.t_final >= 0.0) || !spec.t_final.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_final",
            requirement: "non-negative and finite",
        });
    }
    if spec.record_every == 0 {
        return Err(Error::InvalidParameter {
            name: "record_every",
            requirement: "at least 1",
        });
    }
    let mut op = Operator::new(rho0, spec, p)?;
    let limit = stability_limit(op.stiffness(&rho0.rho, p), spec.model, p);
    let dt_req = match spec.dt {
        Some(dt) if !(dt > 0.0) || !dt.is_finite() => {
            return Err(Error::InvalidParameter {
                name: "dt",
                requirement: "positive and finite",
            })
        }
        Some(dt) if dt > limit => {
            return Err(Error::InvalidParameter {
                name: "dt",
                requirement: "within the explicit stability bound",
            })
        }
        Some(dt) => dt,
        None => DT_SAFETY * limit,
    };
    let steps = if spec.t_final == 0.0 { 0 } else { (spec.t_final / dt_req).ceil() as usize };
    let dt = if steps == 0 { dt_req } else { spec.t_final / steps as f64 };

    let mut state = rho0.clone();
    let n = state.rho.len();
    if op.periodic {
        state.rho[n - 1] = state.rho[0];
    }
    let weights = if op.periodic {
        let mut w = vec![state.grid.h(); n];
        w[n - 1] = 0.0;
        w
    } else {
        state.grid.trapezoid_weights()
    };
    let mass = |rho: &[f64]| rho.iter().zip(&weights).map(|(r, w)| r * w).sum::<f64>();
    let mass0 = mass(&state.rho);

    let (m, b) = (p.mass(), p.friction());
    let mut force = vec![0.0; n - 1];
    let mut current = vec![0.0; n - 1];
    let mut traj = MomentTrajectory::default();
    traj.record(0.0, &state);
    let mut max_mass_error = 0.0f64;
    let mut min_relative = state.rho.iter().copied().fold(f64::INFINITY, f64::min) / state.peak();
    let mut max_floored = 0usize;
    let mut limited_faces = 0usize;

    for step in 1..=steps {
        let t = step as f64 * dt;
        max_floored = max_floored.max(op.fluxes(&state.rho, &mut force));
        if spec.model.is_telegraph() {
            // J lives at half steps; the first one starts from J = 0
            let (keep, gain) = if step == 1 {
                (0.0, 1.0 / (2.0 * m / dt + 0.5 * b))
            } else {
                let a = 0.5 * dt * b / m;
                ((1.0 - a) / (1.0 + a), dt / (m * (1.0 + a)))
            };
            for (j, f) in current.iter_mut().zip(&force) {
                *j = keep * *j + gain * f;
            }
        } else {
            for (j, f) in current.iter_mut().zip(&force) {
                *j = f / b;
            }
        }
        limited_faces += op.limit(&state.rho, dt, &mut current);
        op.advance(&mut state.rho, dt, &current);

        let peak = state.peak();
        let lowest = state.rho.iter().copied().fold(f64::INFINITY, f64::min);
        let drift = (mass(&state.rho) - mass0).abs();
        if !peak.is_finite() || !lowest.is_finite() {
            return Err(Error::Unstable {
                step,
                t,
                detail: "density became non-finite".into(),
            });
        }
        if drift > 1e-8 {
            return Err(Error::Unstable {
                step,
                t,
                detail: format!("mass drifted by {drift:e}"),
            });
        }
        if lowest < -RHO_FLOOR_RELATIVE * peak {
            return Err(Error::Unstable {
                step,
                t,
                detail: format!("density reached {lowest:e} against peak {peak:e}"),
            });
        }
        max_mass_error = max_mass_error.max(drift);
        min_relative = min_relative.min(lowest / peak);
        if step % spec.record_every == 0 || step == steps {
            traj.record(t, &state);
        }
    }
    Ok(Evolution {
        density: state,
        moments: traj,
        steps,
        dt,
        max_mass_error,
        min_relative_density: min_relative,
        max_floored_fraction: max_floored as f64 / n as f64,
        limited_faces,
        rho_floor_relative: RHO_FLOOR_RELATIVE,
    })
}

/// Grid for a free packet: μ ± 12 σ_max with spacing no coarser than `h_max`.
pub fn free_grid(mu: f64, sigma_max: f64, h_max: f64) -> Result<Grid1D> {
    let half = 12.0 * sigma_max;
    let n = ((2.0 * half / h_max).ceil() as usize + 1).max(Grid1D::MIN_NODES);
    Grid1D::centered(mu, half, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, RawParams};
    use proptest::prelude::*;

    fn params(hbar: f64, friction: f64, temperature: f64) -> PhysicalParams {
        make_params(RawParams {
            hbar,
            friction,
            temperature,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn diffusion_of_gaussian() {
        let p = PhysicalParams::natural();
        let grid = free_grid(0.0, (0.04f64 + 2.0).sqrt(), 0.02).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, 0.04).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::ClassicalSmoluchowski, PotentialSpec::Free, 1.0);
        spec.record_every = 50;
        let ev = evolve(&rho, &spec, &p).unwrap();
        for (t, s) in ev.moments.times.iter().zip(&ev.moments.dispersion) {
            let exact = 0.04 + 2.0 * t;
            assert!((s / exact - 1.0).abs() <= 5e-3, "t = {t}: {s} vs {exact}");
        }
        assert!(ev.max_mass_error <= 1e-10 * (ev.steps as f64 / 1e3).max(1.0));
    }

    #[test]
    fn telegraph_moments() {
        let p = PhysicalParams::natural();
        let s0 = 0.25;
        let grid = Grid1D::centered(0.0, 15.0, 601).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, s0).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::ClassicalTelegraph, PotentialSpec::Free, 5.0);
        spec.record_every = 10;
        let ev = evolve(&rho, &spec, &p).unwrap();
        for (t, s) in ev.moments.times.iter().zip(&ev.moments.dispersion).skip(1) {
            let exact = 2.0 * (t - (1.0 - (-t).exp()));
            assert!(((s - s0) / exact - 1.0).abs() <= 0.02, "t = {t}");
        }
    }

    #[test]
    fn quantum_smoluchowski_quarter_power() {
        let p = params(1.0, 100.0, 0.0);
        let s0 = 0.2f64;
        let tau = 0.01;
        let sigma_max = (s0.powi(4) + 1e3 * tau / 100.0).powf(0.25);
        let grid = free_grid(0.0, sigma_max, s0 / 6.0).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, s0 * s0).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::QuantumZeroTSmoluchowski, PotentialSpec::Free, 1e3 * tau);
        spec.record_every = 500;
        let ev = evolve(&rho, &spec, &p).unwrap();
        for (t, s) in ev.moments.times.iter().zip(&ev.moments.dispersion) {
            if *t >= 10.0 * tau {
                let measured = s * s - s0.powi(4);
                assert!((measured / (t / 100.0) - 1.0).abs() <= 0.02, "t = {t}");
            }
        }
    }

    #[test]
    fn semiclassical_harmonic_equilibrium() {
        let p = make_params(RawParams { omega0: 1.0, temperature: 2.0, ..Default::default() }).unwrap();
        let grid = Grid1D::centered(0.0, 10.0, 201).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, 1.0).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::SemiclassicalSmoluchowski, PotentialSpec::Harmonic { omega0: 1.0 }, 20.0);
        spec.record_every = 1_000_000;
        let ev = evolve(&rho, &spec, &p).unwrap();
        let exact = 2.0 / (1.0 - 0.25 / 12.0);
        let s = *ev.moments.dispersion.last().unwrap();
        assert!((s / exact - 1.0).abs() <= 0.01, "{s} vs {exact}");
    }

    #[test]
    fn classical_limit_of_semiclassical_telegraph() {
        let p = params(1e-30, 1.0, 1.0);
        let grid = Grid1D::centered(0.0, 6.0, 121).unwrap();
        let rho = DensityField::gaussian(grid, 0.5, 0.3).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::SemiclassicalTelegraph, PotentialSpec::Quartic { k4: 0.1 }, 1.0);
        spec.dt = Some(1e-3);
        let semi = evolve(&rho, &spec, &p).unwrap();
        spec.model = PdeModel::ClassicalTelegraph;
        let classical = evolve(&rho, &spec, &p).unwrap();
        for (a, b) in semi.density.rho.iter().zip(&classical.density.rho) {
            assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn ehrenfest_mean_under_constant_force() {
        let f = 0.5;
        let grid = Grid1D::centered(0.0, 8.0, 321).unwrap();
        let rho = DensityField::gaussian(grid, -1.0, 0.3).unwrap();
        for model in PdeModel::ALL {
            let p = if model.is_quantum() { params(1.0, 1.0, 0.0) } else { PhysicalParams::natural() };
            let mut spec = EvolveSpec::new(model, PotentialSpec::Linear { force: f }, 2.0);
            spec.record_every = 100;
            let ev = evolve(&rho, &spec, &p).unwrap();
            for (t, mu) in ev.moments.times.iter().zip(&ev.moments.mean).skip(1) {
                let shift = if model.is_telegraph() { f * (t - (1.0 - (-t).exp())) } else { f * t };
                assert!(((mu + 1.0) / shift - 1.0).abs() <= 5e-3, "{model:?} t = {t}");
            }
        }
    }

    #[test]
    fn mass_is_conserved() {
        let grid = Grid1D::centered(0.0, 5.0, 101).unwrap();
        let rho = DensityField::gaussian(grid, 0.3, 0.4).unwrap();
        for model in PdeModel::ALL {
            let p = if model.is_quantum() { params(1.0, 1.0, 0.0) } else { PhysicalParams::natural() };
            let mut spec = EvolveSpec::new(model, PotentialSpec::Quartic { k4: 0.05 }, 1.0);
            spec.record_every = 100_000;
            let ev = evolve(&rho, &spec, &p).unwrap();
            let per_thousand = ev.max_mass_error * 1e3 / ev.steps as f64;
            assert!(per_thousand <= 1e-10, "{model:?}: {}", ev.max_mass_error);
            assert!(ev.min_relative_density >= -1e-14, "{model:?}");
        }
    }

    #[test]
    fn boltzmann_profile_is_stationary() {
        let p = make_params(RawParams { omega0: 1.0, temperature: 0.5, ..Default::default() }).unwrap();
        let grid = Grid1D::centered(0.0, 6.0, 121).unwrap();
        let rho = grid.nodes().iter().map(|x| (-x * x).exp()).collect();
        let mut rho = DensityField::new(grid, rho).unwrap();
        rho.normalize().unwrap();
        for model in [PdeModel::ClassicalSmoluchowski, PdeModel::ClassicalTelegraph] {
            let mut spec = EvolveSpec::new(model, PotentialSpec::Harmonic { omega0: 1.0 }, 1.0);
            spec.record_every = 1_000_000;
            let ev = evolve(&rho, &spec, &p).unwrap();
            let worst = ev.density.rho.iter().zip(&rho.rho).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-13, "{model:?}: {worst}");
            assert_eq!(ev.limited_faces, 0);
        }
    }

    #[test]
    fn periodic_ring_conserves_mass() {
        let grid = Grid1D::new(0.0, 4.0, 81).unwrap();
        let rho = DensityField::gaussian(grid, 2.0, 0.2).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::ClassicalSmoluchowski, PotentialSpec::Linear { force: 1.0 }, 3.0);
        spec.boundary = Boundary::Periodic;
        let p = PhysicalParams::natural();
        let ev = evolve(&rho, &spec, &p).unwrap();
        assert!(ev.max_mass_error <= 1e-12);
        let last = &ev.density.rho;
        assert_eq!(last[0], last[last.len() - 1]);
        // long times relax to the uniform density on the ring
        let mean = last.iter().sum::<f64>() / last.len() as f64;
        assert!(last.iter().all(|r| (r - mean).abs() <= 1e-3));
    }

    #[test]
    fn position_dependent_diffusion_matches_near_equilibrium() {
        let p = make_params(RawParams { omega0: 1.0, temperature: 2.0, ..Default::default() }).unwrap();
        let grid = Grid1D::centered(0.0, 10.0, 201).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, 1.8).unwrap();
        let mut spec = EvolveSpec::new(PdeModel::SemiclassicalSmoluchowski, PotentialSpec::Harmonic { omega0: 1.0 }, 20.0);
        spec.record_every = 1_000_000;
        let a = evolve(&rho, &spec, &p).unwrap();
        spec.flux = FluxAssembly::PositionDependentDiffusion;
        let b = evolve(&rho, &spec, &p).unwrap();
        let (sa, sb) = (a.moments.dispersion.last().unwrap(), b.moments.dispersion.last().unwrap());
        assert!((sa / sb - 1.0).abs() <= 0.02, "{sa} vs {sb}");
    }

    #[test]
    fn rejects_bad_setups() {
        let grid = Grid1D::centered(0.0, 5.0, 101).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, 0.5).unwrap();
        let warm = PhysicalParams::natural();
        let cold = params(1.0, 1.0, 0.0);
        let spec = |model| EvolveSpec::new(model, PotentialSpec::Free, 1.0);
        assert!(evolve(&rho, &spec(PdeModel::QuantumZeroTSmoluchowski), &warm).is_err());
        assert!(evolve(&rho, &spec(PdeModel::ClassicalSmoluchowski), &cold).is_err());
        let mut big = spec(PdeModel::ClassicalSmoluchowski);
        big.dt = Some(1.0);
        assert!(matches!(evolve(&rho, &big, &warm), Err(Error::InvalidParameter { name: "dt", .. })));
        let mut pdd = spec(PdeModel::ClassicalTelegraph);
        pdd.flux = FluxAssembly::PositionDependentDiffusion;
        assert!(evolve(&rho, &pdd, &warm).is_err());
        let frictionless = params(1.0, 0.0, 1.0);
        assert!(evolve(&rho, &spec(PdeModel::ClassicalSmoluchowski), &frictionless).is_err());
        assert!(evolve(&rho, &spec(PdeModel::ClassicalTelegraph), &frictionless).is_ok());
    }

    #[test]
    fn zero_duration_returns_initial_state() {
        let grid = Grid1D::centered(0.0, 5.0, 101).unwrap();
        let rho = DensityField::gaussian(grid, 0.0, 0.5).unwrap();
        let ev = evolve(&rho, &EvolveSpec::new(PdeModel::ClassicalTelegraph, PotentialSpec::Free, 0.0), &PhysicalParams::natural()).unwrap();
        assert_eq!(ev.steps, 0);
        assert_eq!(ev.density, rho);
        assert_eq!(ev.moments.times, vec![0.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn free_translation_invariance(shift in -1.0..1.0f64) {
            let p = PhysicalParams::natural();
            let h = 0.05;
            let k = (shift / h).round() as i64;
            let dx = k as f64 * h;
            let base = Grid1D::centered(0.0, 6.0, 241).unwrap();
            let moved = Grid1D::centered(dx, 6.0, 241).unwrap();
            let mut spec = EvolveSpec::new(PdeModel::ClassicalSmoluchowski, PotentialSpec::Free, 0.5);
            spec.dt = Some(1e-3);
            let a = evolve(&DensityField::gaussian(base, 0.0, 0.3).unwrap(), &spec, &p).unwrap();
            let b = evolve(&DensityField::gaussian(moved, dx, 0.3).unwrap(), &spec, &p).unwrap();
            for i in 0..a.moments.times.len() {
                prop_assert!((b.moments.mean[i] - a.moments.mean[i] - dx).abs() <= 1e-10);
                prop_assert!((b.moments.dispersion[i] - a.moments.dispersion[i]).abs() <= 1e-10);
            }
        }
    }
}
