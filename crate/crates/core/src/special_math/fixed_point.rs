use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub value: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm relative change after each relaxed update.
    pub residuals: Vec<f64>,
}

/// ‖new − old‖∞ / ‖new‖∞, or the absolute change when `new` is zero.
pub fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    let diff = old
        .iter()
        .zip(new)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = new.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Relaxed iteration x ← (1 − θ)x + θ·map(x) until the sup-norm relative
/// change is at most `tol`.
pub fn fixed_point<M>(mut map: M, init: Vec<f64>, theta: f64, tol: f64, max_iter: usize) -> Result<FixedPoint>
where
    M: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "relaxation",
            requirement: "in (0, 1]",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            requirement: "positive",
        });
    }
    let mut x = init;
    let mut residuals = Vec::new();
    for iteration in 1..=max_iter {
        let mapped = map(&x)?;
        if mapped.len() != x.len() {
            return Err(Error::GridMismatch(format!(
                "fixed-point map changed length {} -> {}",
                x.len(),
                mapped.len()
            )));
        }
        let next: Vec<f64> = x
            .iter()
            .zip(&mapped)
            .map(|(old, new)| (1.0 - theta) * old + theta * new)
            .collect();
        if let Some(i) = next.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "fixed-point iterate",
                location: i as f64,
            });
        }
        let residual = relative_change(&x, &next);
        residuals.push(residual);
        x = next;
        if residual <= tol {
            return Ok(FixedPoint {
                value: x,
                iterations: iteration,
                residuals,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residuals,
    })
}
