//! Forward three-term recurrences in unit-scale variables, carried as
//! (mantissa, log-exponent) pairs so that neither the polynomial growth nor the
//! exponential weight factor can overflow or underflow mid-recurrence.

use super::BasisFamily;

const RESCALE_ABOVE: f64 = 1e100;
const LN_RESCALE: f64 = 230.258_509_299_404_6; // ln(1e100)

/// π^{-1/4}
pub(crate) const PI_M14: f64 = 0.751_125_544_464_942_5;

fn start_exponent(family: BasisFamily, s: f64) -> f64 {
    match family {
        BasisFamily::GeneralizedLaguerre { .. } => 0.0,
        BasisFamily::LaguerreFunction { .. } => -0.5 * s,
        BasisFamily::HermiteFunction => -0.5 * s * s,
    }
}

/// Drives the recurrence for `family` at unit-scale argument `s`, calling
/// `visit(ℓ, mantissa, exponent)` with φ̂_ℓ(s) = mantissa·e^{exponent}.
#[inline]
pub(crate) fn walk<F: FnMut(usize, f64, f64)>(family: BasisFamily, s: f64, n: usize, mut visit: F) {
    let mut expo = start_exponent(family, s);
    match family {
        BasisFamily::GeneralizedLaguerre { alpha } | BasisFamily::LaguerreFunction { alpha } => {
            let mut prev = 1.0;
            visit(0, prev, expo);
            if n == 0 {
                return;
            }
            let mut cur = 1.0 + alpha - s;
            visit(1, cur, expo);
            for k in 1..n {
                let kf = k as f64;
                let next = ((2.0 * kf + 1.0 + alpha - s) * cur - (kf + alpha) * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
                if cur.abs() > RESCALE_ABOVE {
                    cur /= RESCALE_ABOVE;
                    prev /= RESCALE_ABOVE;
                    expo += LN_RESCALE;
                }
                visit(k + 1, cur, expo);
            }
        }
        BasisFamily::HermiteFunction => {
            let mut prev = PI_M14;
            visit(0, prev, expo);
            if n == 0 {
                return;
            }
            let mut cur = std::f64::consts::SQRT_2 * s * prev;
            visit(1, cur, expo);
            for k in 1..n {
                let kf = k as f64;
                let next = (2.0 / (kf + 1.0)).sqrt() * s * cur - (kf / (kf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                if cur.abs() > RESCALE_ABOVE {
                    cur /= RESCALE_ABOVE;
                    prev /= RESCALE_ABOVE;
                    expo += LN_RESCALE;
                }
                visit(k + 1, cur, expo);
            }
        }
    }
}

/// Plain values φ̂_0..φ̂_n at s.
pub(crate) fn values(family: BasisFamily, s: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    let mut last_expo = f64::NAN;
    let mut factor = 0.0;
    walk(family, s, n, |l, m, e| {
        if e != last_expo {
            last_expo = e;
            factor = e.exp();
        }
        out[l] = m * factor;
    });
    out
}

/// Σ c_ℓ φ̂_ℓ(s) returned as (mantissa, exponent).
pub(crate) fn sum_scaled(family: BasisFamily, s: f64, coeffs: &[f64]) -> (f64, f64) {
    let n = coeffs.len() - 1;
    let mut acc = 0.0;
    let mut cur_expo = f64::NAN;
    walk(family, s, n, |l, m, e| {
        if cur_expo.is_nan() {
            cur_expo = e;
        } else if e != cur_expo {
            acc *= (cur_expo - e).exp();
            cur_expo = e;
        }
        acc += coeffs[l] * m;
    });
    (acc, cur_expo)
}

/// Σ c_ℓ φ̂_ℓ(s).
pub(crate) fn sum(family: BasisFamily, s: f64, coeffs: &[f64]) -> f64 {
    let (m, e) = sum_scaled(family, s, coeffs);
    if m == 0.0 {
        0.0
    } else {
        m * e.exp()
    }
}
