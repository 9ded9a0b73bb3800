//! Unit-scale (β = 1, x_L = 0) Gauss and Gauss-Radau rules with cached
//! interpolation tables. Scaled rules are affine images of these.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

use super::recurrence::walk;
use super::tridiag::symmetric_tridiagonal_eigen;
use super::{BasisFamily, RuleKind};
use crate::error::{Result, SpectralError};

#[derive(Debug)]
pub(crate) struct UnitRule {
    pub xi: Vec<f64>,
    /// Weights against the family weight ξ^α e^{-ξ} or e^{-y²}.
    pub w: Vec<f64>,
    /// Weights for ∫ f ξ^α dξ (Laguerre) or ∫ f dy (Hermite).
    pub w_plain: Vec<f64>,
    /// Discrete transform, row ℓ, column j: φ̂_ℓ(ξ_j)·ŵ_j/γ̂_ℓ.
    pub transform: Vec<f64>,
    /// Basis values, row j, column ℓ: φ̂_ℓ(ξ_j).
    pub values: Vec<f64>,
}

type Key = (u8, u64, usize, u8);

fn cache() -> &'static Mutex<HashMap<Key, Arc<UnitRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<UnitRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn key(family: BasisFamily, n: usize, kind: RuleKind) -> Key {
    let (tag, alpha) = match family {
        BasisFamily::GeneralizedLaguerre { alpha } => (0, alpha),
        BasisFamily::LaguerreFunction { alpha } => (1, alpha),
        BasisFamily::HermiteFunction => (2, 0.0),
    };
    let k = match kind {
        RuleKind::Gauss => 0,
        RuleKind::GaussRadau => 1,
    };
    (tag, alpha.to_bits(), n, k)
}

/// Unit rule with N+1 = `n`+1 nodes, built once per process.
pub(crate) fn unit_rule(family: BasisFamily, n: usize, kind: RuleKind) -> Result<Arc<UnitRule>> {
    let k = key(family, n, kind);
    if let Some(r) = cache().lock().unwrap_or_else(|e| e.into_inner()).get(&k) {
        return Ok(Arc::clone(r));
    }
    let rule = Arc::new(build(family, n, kind)?);
    cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(k, Arc::clone(&rule));
    Ok(rule)
}

pub(crate) fn ln_gammas(family: BasisFamily, n: usize) -> Vec<f64> {
    match family {
        BasisFamily::HermiteFunction => vec![0.0; n + 1],
        BasisFamily::GeneralizedLaguerre { alpha } | BasisFamily::LaguerreFunction { alpha } => {
            let mut out = Vec::with_capacity(n + 1);
            let mut g = ln_gamma(alpha + 1.0);
            out.push(g);
            for l in 1..=n {
                let lf = l as f64;
                g += ((lf + alpha) / lf).ln();
                out.push(g);
            }
            out
        }
    }
}

fn jacobi(family: BasisFamily, size: usize) -> (Vec<f64>, Vec<f64>) {
    match family {
        BasisFamily::HermiteFunction => (
            vec![0.0; size],
            (1..size).map(|k| (k as f64 / 2.0).sqrt()).collect(),
        ),
        BasisFamily::GeneralizedLaguerre { alpha } | BasisFamily::LaguerreFunction { alpha } => (
            (0..size).map(|k| 2.0 * k as f64 + alpha + 1.0).collect(),
            (1..size)
                .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
                .collect(),
        ),
    }
}

/// Radau modification: replace the last diagonal entry so that 0 is an eigenvalue.
fn radau_modify(diag: &mut [f64], off: &[f64]) {
    let size = diag.len();
    let mut ratio = -diag[0];
    for k in 1..size - 1 {
        ratio = -diag[k] - off[k - 1] * off[k - 1] / ratio;
    }
    let b = off[size - 2];
    diag[size - 1] = -b * b / ratio;
}

/// Newton polish of a root of the polynomial whose roots the nodes are.
fn polish(family: BasisFamily, kind: RuleKind, n: usize, x: f64) -> f64 {
    // Gauss: roots of p_{n+1}; Radau interior nodes: roots of L_n^{(α+1)}
    let (fam, deg) = match (family, kind) {
        (BasisFamily::HermiteFunction, _) => (BasisFamily::HermiteFunction, n + 1),
        (f, RuleKind::Gauss) => (BasisFamily::GeneralizedLaguerre { alpha: f.alpha() }, n + 1),
        (f, RuleKind::GaussRadau) => (
            BasisFamily::GeneralizedLaguerre {
                alpha: f.alpha() + 1.0,
            },
            n,
        ),
    };
    let mut x = x;
    for _ in 0..3 {
        let mut top = (0.0, 0.0);
        let mut below = (0.0, 0.0);
        walk(fam, x, deg, |l, m, e| {
            if l + 1 == deg {
                below = (m, e);
            } else if l == deg {
                top = (m, e);
            }
        });
        if top.0 == 0.0 {
            break;
        }
        let lower = below.0 * (below.1 - top.1).exp();
        let step = match fam {
            BasisFamily::HermiteFunction => {
                // orthonormal Hermite polynomials: h'_d = √(2d)·h_{d-1}
                top.0 / ((2.0 * deg as f64).sqrt() * lower)
            }
            _ => {
                let a = fam.alpha();
                let d = deg as f64;
                x * top.0 / (d * top.0 - (d + a) * lower)
            }
        };
        if !step.is_finite() || step.abs() > 1e-6 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn build(family: BasisFamily, n: usize, kind: RuleKind) -> Result<UnitRule> {
    let size = n + 1;
    if size < 2 {
        return Err(SpectralError::InvalidParameter("rule needs N ≥ 1".into()));
    }
    if kind == RuleKind::GaussRadau && family == BasisFamily::HermiteFunction {
        return Err(SpectralError::Unsupported(
            "Gauss-Radau rule on the whole line",
        ));
    }
    let (mut diag, off) = jacobi(family, size);
    if kind == RuleKind::GaussRadau {
        radau_modify(&mut diag, &off);
    }
    let (mut xi, _) = symmetric_tridiagonal_eigen(&diag, &off, false)?;
    for (j, x) in xi.iter_mut().enumerate() {
        if kind == RuleKind::GaussRadau && j == 0 {
            *x = 0.0;
        } else {
            *x = polish(family, kind, n, *x);
        }
    }
    if family == BasisFamily::HermiteFunction {
        // enforce exact symmetry
        for j in 0..size / 2 {
            let a = 0.5 * (xi[size - 1 - j] - xi[j]);
            xi[j] = -a;
            xi[size - 1 - j] = a;
        }
        if size % 2 == 1 {
            xi[size / 2] = 0.0;
        }
    }

    let lg = ln_gammas(family, n);
    let poly = match family {
        BasisFamily::HermiteFunction => BasisFamily::HermiteFunction,
        f => BasisFamily::GeneralizedLaguerre { alpha: f.alpha() },
    };
    let mut w = vec![0.0; size];
    let mut w_plain = vec![0.0; size];
    let mut transform = vec![0.0; size * size];
    let mut values = vec![0.0; size * size];
    let mut lm = vec![0.0; size];
    let mut sg = vec![0.0; size];
    let mut terms = vec![0.0; size];
    for (j, &s) in xi.iter().enumerate() {
        // polynomial parts only: undo the Hermite weight factor
        let undo = if poly == BasisFamily::HermiteFunction {
            0.5 * s * s
        } else {
            0.0
        };
        walk(poly, s, n, |l, m, e| {
            sg[l] = if m < 0.0 { -1.0 } else { 1.0 };
            lm[l] = m.abs().ln() + e + undo;
        });
        for l in 0..size {
            terms[l] = 2.0 * lm[l] - lg[l];
        }
        let ln_w = -log_sum_exp(&terms);
        let (shift, damp) = match family {
            BasisFamily::GeneralizedLaguerre { .. } => (s, 0.0),
            BasisFamily::LaguerreFunction { .. } => (s, 0.5 * s),
            BasisFamily::HermiteFunction => (s * s, 0.5 * s * s),
        };
        w[j] = ln_w.exp();
        w_plain[j] = (ln_w + shift).exp();
        let ln_norm_w = if damp == 0.0 { ln_w } else { ln_w + shift };
        for l in 0..size {
            values[j * size + l] = sg[l] * (lm[l] - damp).exp();
            transform[l * size + j] = sg[l] * (lm[l] - damp + ln_norm_w - lg[l]).exp();
        }
    }
    if w.iter().any(|x| !x.is_finite()) || transform.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::NonFinite(format!("unit rule of order {n}")));
    }
    Ok(UnitRule {
        xi,
        w,
        w_plain,
        transform,
        values,
    })
}
