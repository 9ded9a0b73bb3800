//! Chebyshev interpolant on a finite interval, used for interior patches.

use std::f64::consts::PI;

use crate::error::{Result, SpectralError};

#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevInterior {
    pub a: f64,
    pub b: f64,
    /// Samples at the Chebyshev-Gauss-Lobatto points, ascending in x.
    pub values: Vec<f64>,
}

/// K+1 Chebyshev-Gauss-Lobatto points of [a, b], ascending.
pub fn cgl_nodes(k: usize, a: f64, b: f64) -> Vec<f64> {
    (0..=k)
        .map(|j| {
            let s = -(PI * j as f64 / k as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * s
        })
        .collect()
}

impl ChebyshevInterior {
    pub fn new(values: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(SpectralError::InvalidParameter(
                "Chebyshev interior needs K ≥ 1".into(),
            ));
        }
        if !(b > a) {
            return Err(SpectralError::InvalidParameter(format!(
                "empty interval [{a}, {b}]"
            )));
        }
        Ok(Self { a, b, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(k: usize, a: f64, b: f64, f: F) -> Result<Self> {
        if k < 1 {
            return Err(SpectralError::InvalidParameter(
                "Chebyshev interior needs K ≥ 1".into(),
            ));
        }
        Self::new(cgl_nodes(k, a, b).into_iter().map(f).collect(), a, b)
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        cgl_nodes(self.degree(), self.a, self.b)
    }

    /// Barycentric evaluation (weights (−1)^j, halved at the ends).
    pub fn evaluate(&self, x: f64) -> f64 {
        barycentric(&self.nodes(), &self.values, x)
    }
}

pub(crate) fn barycentric(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let k = nodes.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, (xj, fj)) in nodes.iter().zip(values).enumerate() {
        let d = x - xj;
        if d == 0.0 {
            return *fj;
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == k {
            w *= 0.5;
        }
        num += w / d * fj;
        den += w / d;
    }
    num / den
}

/// Composite 5-point Gauss-Legendre quadrature on [a, b].
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    if !(b > a) {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(&W) {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}
