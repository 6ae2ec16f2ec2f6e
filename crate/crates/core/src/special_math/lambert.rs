use std::f64::consts::E;

use crate::error::{Error, Result};

/// The branch point -1/e.
pub const BRANCH_POINT: f64 = -0.36787944117144233;

const BRANCH_SNAP: f64 = 1e-15;
const MAX_HALLEY: usize = 64;

/// Lower real branch W₋₁ of the inverse of w·eʷ, for x in (-1/e, 0).
///
/// Returns exactly -1 within 1e-15 of the branch point.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    let out_of_domain = || Error::Domain {
        function: "lambert_w_minus1",
        value: x,
        domain: "(-1/e, 0)",
    };
    if !x.is_finite() || !(BRANCH_POINT - BRANCH_SNAP..0.0).contains(&x) {
        return Err(out_of_domain());
    }
    if (x - BRANCH_POINT).abs() <= BRANCH_SNAP {
        return Ok(-1.0);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    // one Newton polish against the last rounding step
    let ew = w.exp();
    let wp1 = w + 1.0;
    if wp1.abs() > 1e-6 {
        let polished = (w - (w * ew - x) / (ew * wp1)).min(-1.0);
        if (polished * polished.exp() - x).abs() <= (w * ew - x).abs() {
            w = polished;
        }
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        let p = -(2.0 * E.mul_add(x, 1.0).max(0.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}
