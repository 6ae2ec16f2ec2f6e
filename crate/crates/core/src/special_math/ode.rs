use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeMethod {
    /// Classical fixed-step Runge–Kutta; the step is `max_step`, shortened to
    /// divide every output interval evenly.
    Rk4,
    /// Dormand–Prince 5(4) with error control.
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolverConfig {
    pub method: OdeMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeSolverConfig {
    fn default() -> Self {
        OdeSolverConfig {
            method: OdeMethod::Rk45,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl OdeSolverConfig {
    pub fn rk4(step: f64) -> Self {
        OdeSolverConfig {
            method: OdeMethod::Rk4,
            max_step: step,
            ..Default::default()
        }
    }

    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        OdeSolverConfig {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "ODE tolerances",
                requirement: "positive",
            });
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParameter {
                name: "max_step",
                requirement: "positive",
            });
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "max_steps",
                requirement: "at least 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest accepted error-to-tolerance ratio (≤ 1 for RK45, 0 for RK4).
    pub max_error_ratio: f64,
}

impl OdeSolution {
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

/// Integrates y' = rhs(t, y) and reports y at every time of `t_grid`.
///
/// The first grid time is the initial time. The adaptive method lands
/// exactly on each grid time rather than interpolating.
pub fn solve_ode<F>(mut rhs: F, y0: &[f64], t_grid: &[f64], cfg: &OdeSolverConfig) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    cfg.validate()?;
    if t_grid.is_empty() {
        return Err(Error::GridMismatch("empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::GridMismatch("time grid must be strictly increasing".into()));
    }
    let mut integrator = Integrator::new(y0.len());
    let t0 = t_grid[0];
    integrator.eval(&mut rhs, t0, y0, 0)?;
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "initial state", location: t0 });
    }

    let mut sol = OdeSolution {
        times: t_grid.to_vec(),
        states: Vec::with_capacity(t_grid.len()),
        accepted_steps: 0,
        rejected_steps: 0,
        max_error_ratio: 0.0,
    };
    sol.states.push(y0.to_vec());
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = f64::NAN;

    for &target in &t_grid[1..] {
        match cfg.method {
            OdeMethod::Rk4 => {
                let span = target - t;
                let pieces = if cfg.max_step.is_finite() {
                    (span / cfg.max_step).ceil().max(1.0) as usize
                } else {
                    1
                };
                let dt = span / pieces as f64;
                for i in 0..pieces {
                    if sol.accepted_steps >= cfg.max_steps {
                        return Err(Error::StepLimit { t, max_steps: cfg.max_steps });
                    }
                    let t_i = t + i as f64 * dt;
                    integrator.rk4_step(&mut rhs, t_i, dt, &mut y)?;
                    sol.accepted_steps += 1;
                }
                t = target;
            }
            OdeMethod::Rk45 => {
                if h.is_nan() {
                    h = integrator.initial_step(&mut rhs, t, &y, target - t, cfg)?;
                }
                while t < target {
                    if sol.accepted_steps + sol.rejected_steps >= cfg.max_steps {
                        return Err(Error::StepLimit { t, max_steps: cfg.max_steps });
                    }
                    h = h.min(cfg.max_step);
                    let remaining = target - t;
                    let landing = h >= remaining * (1.0 - 1e-12);
                    let step = if landing { remaining } else { h };
                    let ratio = integrator.dopri_step(&mut rhs, t, step, &y, cfg)?;
                    if ratio <= 1.0 {
                        t = if landing { target } else { t + step };
                        y.copy_from_slice(&integrator.y_new);
                        integrator.k.swap(0, 6);
                        sol.accepted_steps += 1;
                        sol.max_error_ratio = sol.max_error_ratio.max(ratio);
                        let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                        // keep the natural step after a clipped landing step
                        h = if landing { h.max(step * grow) } else { step * grow };
                    } else {
                        sol.rejected_steps += 1;
                        h = step * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
                        if h <= 1e-15 * t.abs().max(1e-300) {
                            return Err(Error::StepUnderflow { t });
                        }
                    }
                }
            }
        }
        sol.states.push(y.clone());
    }
    Ok(sol)
}

// Dormand–Prince coefficients
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Integrator {
    k: Vec<Vec<f64>>,
    stage: Vec<f64>,
    y_new: Vec<f64>,
}

impl Integrator {
    fn new(n: usize) -> Self {
        Integrator {
            k: vec![vec![0.0; n]; 7],
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
        }
    }

    fn eval<F: FnMut(f64, &[f64], &mut [f64])>(&mut self, rhs: &mut F, t: f64, y: &[f64], slot: usize) -> Result<()> {
        rhs(t, y, &mut self.k[slot]);
        if self.k[slot].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "ODE right-hand side", location: t });
        }
        Ok(())
    }

    fn rk4_step<F: FnMut(f64, &[f64], &mut [f64])>(&mut self, rhs: &mut F, t: f64, dt: f64, y: &mut [f64]) -> Result<()> {
        let n = y.len();
        self.eval(rhs, t, y, 0)?;
        for (i, s) in [(1usize, 0.5), (2, 0.5), (3, 1.0)] {
            for j in 0..n {
                self.stage[j] = y[j] + s * dt * self.k[i - 1][j];
            }
            let stage = std::mem::take(&mut self.stage);
            let res = self.eval(rhs, t + s * dt, &stage, i);
            self.stage = stage;
            res?;
        }
        for j in 0..n {
            y[j] += dt / 6.0 * (self.k[0][j] + 2.0 * self.k[1][j] + 2.0 * self.k[2][j] + self.k[3][j]);
        }
        Ok(())
    }

    fn initial_step<F: FnMut(f64, &[f64], &mut [f64])>(
        &mut self,
        rhs: &mut F,
        t: f64,
        y: &[f64],
        span: f64,
        cfg: &OdeSolverConfig,
    ) -> Result<f64> {
        let scale = |v: f64| cfg.abs_tol + cfg.rel_tol * v.abs();
        let d0 = rms(y.iter().map(|v| v / scale(*v)));
        let d1 = rms(y.iter().zip(&self.k[0]).map(|(v, f)| f / scale(*v)));
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span).min(cfg.max_step);
        for j in 0..y.len() {
            self.stage[j] = y[j] + h0 * self.k[0][j];
        }
        let stage = std::mem::take(&mut self.stage);
        let res = self.eval(rhs, t + h0, &stage, 1);
        self.stage = stage;
        res?;
        let d2 = rms(y.iter().zip(self.k[1].iter().zip(&self.k[0])).map(|(v, (f1, f0))| (f1 - f0) / scale(*v))) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (1e-6f64).max(1e-3 * h0)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(span).min(cfg.max_step))
    }

    /// One trial step from the cached k[0]; returns the error ratio.
    fn dopri_step<F: FnMut(f64, &[f64], &mut [f64])>(
        &mut self,
        rhs: &mut F,
        t: f64,
        h: f64,
        y: &[f64],
        cfg: &OdeSolverConfig,
    ) -> Result<f64> {
        let n = y.len();
        for s in 1..7 {
            for j in 0..n {
                let mut acc = 0.0;
                for (r, a) in A[s][..s].iter().enumerate() {
                    acc += a * self.k[r][j];
                }
                self.stage[j] = y[j] + h * acc;
            }
            let stage = std::mem::take(&mut self.stage);
            let res = self.eval(rhs, t + C[s] * h, &stage, s);
            if s == 6 {
                self.y_new.copy_from_slice(&stage);
            }
            self.stage = stage;
            res?;
        }
        let mut ratio: f64 = 0.0;
        for j in 0..n {
            let mut err = 0.0;
            for (s, e) in E.iter().enumerate() {
                err += e * self.k[s][j];
            }
            let tol = cfg.abs_tol + cfg.rel_tol * y[j].abs().max(self.y_new[j].abs());
            ratio = ratio.max((h * err).abs() / tol);
        }
        Ok(if ratio.is_nan() { f64::INFINITY } else { ratio })
    }
}

fn rms<I: Iterator<Item = f64>>(values: I) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_decay() {
        let sol = solve_ode(|_, y, dy| dy[0] = -y[0], &[1.0], &[0.0, 1.0], &OdeSolverConfig::default()).unwrap();
        assert!((sol.states[1][0] - (-1f64).exp()).abs() <= 1e-9);
        assert!(sol.max_error_ratio <= 1.0);
    }

    #[test]
    fn rk4_integrates_linear_motion_exactly() {
        let grid: Vec<f64> = (0..=10).map(|i| 0.37 * i as f64).collect();
        let sol = solve_ode(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = 0.0;
            },
            &[0.0, 1.0],
            &grid,
            &OdeSolverConfig::rk4(0.05),
        )
        .unwrap();
        for (t, s) in grid.iter().zip(&sol.states) {
            assert!((s[0] - t).abs() <= 1e-14 * (1.0 + t));
        }
    }

    #[test]
    fn oscillator_returns_after_one_period() {
        let osc = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let sol = solve_ode(osc, &[1.0, 0.0], &[0.0, 2.0 * PI], &OdeSolverConfig::default()).unwrap();
        let end = &sol.states[1];
        assert!((end[0] - 1.0).abs() <= 1e-8 && end[1].abs() <= 1e-8, "{end:?}");
        let energy = 0.5 * (end[0] * end[0] + end[1] * end[1]);
        assert!((energy - 0.5).abs() <= 1e-8);

        let rk4 = solve_ode(osc, &[1.0, 0.0], &[0.0, 2.0 * PI], &OdeSolverConfig::rk4(1e-3)).unwrap();
        assert!((rk4.states[1][0] - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn lands_on_every_grid_time() {
        let grid: Vec<f64> = (0..50).map(|i| (i as f64 * 0.06).exp() - 1.0).collect();
        let sol = solve_ode(|t, _, dy| dy[0] = t.cos(), &[0.0], &grid, &OdeSolverConfig::default()).unwrap();
        for (t, s) in grid.iter().zip(&sol.states) {
            assert!((s[0] - t.sin()).abs() <= 1e-8, "{t}");
        }
    }

    #[test]
    fn tighter_tolerance_never_worse() {
        let mut last = f64::INFINITY;
        for k in 4..11 {
            let tol = 10f64.powi(-k);
            let cfg = OdeSolverConfig::with_tolerances(tol, tol * 1e-2);
            let sol = solve_ode(|t, y, dy| dy[0] = -2.0 * t * y[0], &[1.0], &[0.0, 0.5, 1.0, 2.0], &cfg).unwrap();
            let err = (sol.states[3][0] - (-4f64).exp()).abs().max((sol.states[2][0] - (-1f64).exp()).abs());
            assert!(err <= last * 1.0001 + 1e-15, "tol {tol}: {err} vs {last}");
            last = err;
        }
    }

    #[test]
    fn nan_rhs_reports_time() {
        let err = solve_ode(
            |t, _, dy| dy[0] = if t > 0.5 { f64::NAN } else { 1.0 },
            &[0.0],
            &[0.0, 1.0],
            &OdeSolverConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::NonFinite { location, .. } => assert!(location > 0.5 && location <= 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_budget_exhaustion() {
        let cfg = OdeSolverConfig {
            max_steps: 5,
            ..OdeSolverConfig::with_tolerances(1e-12, 1e-14)
        };
        let err = solve_ode(|_, y, dy| dy[0] = y[0].cos() * 30.0, &[0.0], &[0.0, 100.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::StepLimit { .. }));
    }

    #[test]
    fn rejects_bad_grids_and_config() {
        let f = |_: f64, _: &[f64], dy: &mut [f64]| dy[0] = 0.0;
        assert!(solve_ode(f, &[0.0], &[1.0, 0.5], &OdeSolverConfig::default()).is_err());
        assert!(solve_ode(f, &[0.0], &[], &OdeSolverConfig::default()).is_err());
        let bad = OdeSolverConfig { rel_tol: 0.0, ..Default::default() };
        assert!(solve_ode(f, &[0.0], &[0.0, 1.0], &bad).is_err());
    }
}
