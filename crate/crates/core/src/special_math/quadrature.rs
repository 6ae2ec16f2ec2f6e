use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadratureScheme {
    Trapezoid,
    Simpson,
}

/// Uniform rule on [0, β] with `n` nodes, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureRule {
    n: usize,
    scheme: QuadratureScheme,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            n: 65,
            scheme: QuadratureScheme::Simpson,
        }
    }
}

impl QuadratureRule {
    pub fn new(n: usize, scheme: QuadratureScheme) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "quadrature node count",
                requirement: "at least 2",
            });
        }
        if scheme == QuadratureScheme::Simpson && n % 2 == 0 {
            return Err(Error::InvalidParameter {
                name: "Simpson node count",
                requirement: "odd",
            });
        }
        Ok(QuadratureRule { n, scheme })
    }

    pub fn trapezoid(n: usize) -> Result<Self> {
        Self::new(n, QuadratureScheme::Trapezoid)
    }

    pub fn simpson(n: usize) -> Result<Self> {
        Self::new(n, QuadratureScheme::Simpson)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> QuadratureScheme {
        self.scheme
    }

    pub fn nodes(&self, beta: f64) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        (0..self.n).map(|i| beta * i as f64 / last).collect()
    }

    pub fn weights(&self, beta: f64) -> Vec<f64> {
        let h = beta / (self.n - 1) as f64;
        let mut w = vec![h; self.n];
        match self.scheme {
            QuadratureScheme::Trapezoid => {
                w[0] = 0.5 * h;
                w[self.n - 1] = 0.5 * h;
            }
            QuadratureScheme::Simpson => {
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi = if i == 0 || i == self.n - 1 {
                        h / 3.0
                    } else if i % 2 == 1 {
                        4.0 * h / 3.0
                    } else {
                        2.0 * h / 3.0
                    };
                }
            }
        }
        w
    }
}

/// ∫₀^β f(β') dβ' on the rule's nodes. β = 0 gives exactly 0.
pub fn integrate_beta<F: FnMut(f64) -> f64>(mut f: F, beta: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Domain {
            function: "integrate_beta",
            value: beta,
            domain: "beta >= 0",
        });
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for (node, weight) in rule.nodes(beta).into_iter().zip(rule.weights(beta)) {
        let value = f(node);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: "beta integrand",
                location: node,
            });
        }
        sum += weight * value;
    }
    Ok(sum)
}

/// Trapezoid rule on arbitrary increasing nodes.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Composite Simpson rule on arbitrary increasing nodes; an odd node count
/// pairs every panel, an even count closes with a causal quadratic panel.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    match CumulativeQuadrature::new(x, QuadratureScheme::Simpson) {
        Ok(q) => *q.apply(y).last().unwrap_or(&0.0),
        Err(_) => 0.0,
    }
}

/// Running integrals I_k = ∫_{x₀}^{x_k} on a fixed node set, built so that
/// I_k depends only on samples at nodes ≤ k.
///
/// I_k = I_{base(k)} + Σ local(k) weights · samples. Marching solvers use
/// the weight of node k in its own integral to solve for the new sample;
/// that weight is always positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeQuadrature {
    nodes: Vec<f64>,
    base: Vec<usize>,
    local: Vec<Vec<(usize, f64)>>,
}

impl CumulativeQuadrature {
    pub fn new(nodes: &[f64], scheme: QuadratureScheme) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::GridMismatch("empty quadrature node set".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::GridMismatch(
                "quadrature nodes must be finite and strictly increasing".into(),
            ));
        }
        let n = nodes.len();
        let mut base = vec![0; n];
        let mut local = vec![Vec::new(); n];
        for k in 1..n {
            let trapezoid = scheme == QuadratureScheme::Trapezoid || k == 1;
            // a paired panel gives node k a negative weight once its left
            // interval exceeds twice the right one
            let paired = k % 2 == 0 && nodes[k - 1] - nodes[k - 2] < 2.0 * (nodes[k] - nodes[k - 1]);
            if trapezoid {
                let h = nodes[k] - nodes[k - 1];
                base[k] = k - 1;
                local[k] = vec![(k - 1, 0.5 * h), (k, 0.5 * h)];
            } else if paired {
                let a = nodes[k - 1] - nodes[k - 2];
                let c = nodes[k] - nodes[k - 1];
                let s = a + c;
                base[k] = k - 2;
                local[k] = vec![
                    (k - 2, s * (2.0 * a - c) / (6.0 * a)),
                    (k - 1, s * s * s / (6.0 * a * c)),
                    (k, s * (2.0 * c - a) / (6.0 * c)),
                ];
            } else {
                let a = nodes[k - 1] - nodes[k - 2];
                let c = nodes[k] - nodes[k - 1];
                base[k] = k - 1;
                local[k] = vec![
                    (k - 2, -c * c * c / (6.0 * a * (a + c))),
                    (k - 1, c * (c + 3.0 * a) / (6.0 * a)),
                    (k, c * (3.0 * a + 2.0 * c) / (6.0 * (a + c))),
                ];
            }
        }
        Ok(CumulativeQuadrature {
            nodes: nodes.to_vec(),
            base,
            local,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the earlier running integral that I_k extends.
    pub fn base(&self, k: usize) -> usize {
        self.base[k]
    }

    /// (node, weight) pairs added on top of I_{base(k)}.
    pub fn local(&self, k: usize) -> &[(usize, f64)] {
        &self.local[k]
    }

    /// Weight of sample k inside I_k.
    pub fn self_weight(&self, k: usize) -> f64 {
        self.local[k]
            .iter()
            .find(|(i, _)| *i == k)
            .map_or(0.0, |(_, w)| *w)
    }

    /// I_k from already-known running integrals and samples, leaving out the
    /// contribution of sample k itself.
    pub fn partial(&self, k: usize, running: &[f64], samples: &[f64]) -> f64 {
        if k == 0 {
            return 0.0;
        }
        running[self.base[k]]
            + self.local[k]
                .iter()
                .filter(|(i, _)| *i != k)
                .map(|(i, w)| w * samples[*i])
                .sum::<f64>()
    }

    /// All running integrals of `samples`.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        self.apply_into(samples, &mut out);
        out
    }

    pub fn apply_into(&self, samples: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        for k in 1..self.nodes.len() {
            out[k] = out[self.base[k]]
                + self.local[k]
                    .iter()
                    .map(|(i, w)| w * samples[*i])
                    .sum::<f64>();
        }
    }
}
