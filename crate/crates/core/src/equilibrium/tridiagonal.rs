//! Symmetric tridiagonal linear algebra for the discretized Hamiltonian.

/// LU factors of a tridiagonal matrix with the given diagonals, reused for
/// many right-hand sides.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    lower: Vec<f64>,
    upper: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    /// `lower[i]` couples row i+1 to column i, `upper[i]` row i to column i+1.
    pub(crate) fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        let mut inv_pivot = vec![0.0; n];
        let mut factor_upper = vec![0.0; n.saturating_sub(1)];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = diag[i] - lower[i - 1] * factor_upper[i - 1];
            }
            if pivot == 0.0 {
                pivot = f64::EPSILON * (diag[i].abs() + 1.0);
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                factor_upper[i] = upper[i] * inv_pivot[i];
            }
        }
        Tridiagonal {
            lower: lower.to_vec(),
            upper: factor_upper,
            inv_pivot,
        }
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        x[0] *= self.inv_pivot[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i - 1] * x[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper[i] * x[i + 1];
        }
    }
}

/// Constant-coefficient cyclic tridiagonal solve by Sherman–Morrison:
/// diagonal `d`, every off-diagonal and both corners equal to `e`.
#[derive(Debug, Clone)]
pub(crate) struct Cyclic {
    inner: Tridiagonal,
    gamma: f64,
    e: f64,
    z: Vec<f64>,
}

impl Cyclic {
    pub(crate) fn factor(d: f64, e: f64, n: usize) -> Self {
        let gamma = -d;
        let mut diag = vec![d; n];
        diag[0] = d - gamma;
        diag[n - 1] = d - e * e / gamma;
        let off = vec![e; n - 1];
        let inner = Tridiagonal::factor(&off, &diag, &off);
        let mut z = vec![0.0; n];
        z[0] = gamma;
        z[n - 1] = e;
        inner.solve_in_place(&mut z);
        Cyclic { inner, gamma, e, z }
    }

    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        self.inner.solve_in_place(x);
        let fact = (x[0] + self.e * x[n - 1] / self.gamma)
            / (1.0 + self.z[0] + self.e * self.z[n - 1] / self.gamma);
        for (xi, zi) in x.iter_mut().zip(&self.z) {
            *xi -= fact * zi;
        }
    }
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `e` (Sturm sequence count).
pub(crate) fn count_below(d: &[f64], e: f64, x: f64) -> usize {
    let e2 = e * e;
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for (i, di) in d.iter().enumerate() {
        q = di - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
pub(crate) fn eigenvalue(d: &[f64], e: f64, k: usize) -> f64 {
    let lo0 = d.iter().fold(f64::INFINITY, |a, v| a.min(*v)) - 2.0 * e.abs();
    let hi0 = d.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v)) + 2.0 * e.abs();
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector for `lambda` by inverse iteration, orthogonalized against
/// `previous` and normalized to unit Euclidean length.
pub(crate) fn eigenvector(d: &[f64], e: f64, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
    let n = d.len();
    let scale = d.iter().fold(e.abs(), |a, v| a.max(v.abs()));
    let shift = lambda - 1e-12 * scale;
    let diag: Vec<f64> = d.iter().map(|v| v - shift).collect();
    let off = vec![e; n - 1];
    let lu = Tridiagonal::factor(&off, &diag, &off);
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64).collect();
    for _ in 0..4 {
        for q in previous {
            let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
        }
        lu.solve_in_place(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    for q in previous {
        let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}
