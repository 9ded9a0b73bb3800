//! Frequency indicator (share of the norm in the top M modes) and
//! exterior-error indicator (share of the derivative norm right of x_R).
//! Both return `None` where the ratio is undefined.

use ndarray::Axis;

use crate::approx::{Expansion, Expansion2D};
use crate::basis::{unit_rule, BasisFamily, RuleKind, ScaledBasis};
use crate::error::{Result, SpectralError};

#[derive(Debug, Clone, Copy)]
pub struct IndicatorConfig {
    /// Number M of top modes in the frequency indicator.
    pub m_rule: fn(usize) -> usize,
    /// Index of the collocation node used as x_R.
    pub xr_index: fn(usize) -> usize,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self {
            m_rule: |n| n / 3,
            xr_index: |n| n.div_ceil(3),
        }
    }
}

impl IndicatorConfig {
    pub fn m(&self, n: usize) -> usize {
        (self.m_rule)(n).clamp(1, n)
    }

    pub fn x_r(&self, basis: &ScaledBasis) -> Result<f64> {
        let nodes = basis.nodes()?;
        let k = (self.xr_index)(basis.n).clamp(1, basis.n - 1);
        Ok(nodes[k])
    }
}

fn tail_share(energy: &[f64], m: usize) -> Option<f64> {
    let total: f64 = energy.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let n = energy.len() - 1;
    let top: f64 = energy[n + 1 - m..].iter().sum();
    Some((top / total).sqrt().min(1.0))
}

pub fn frequency_indicator(exp: &Expansion, cfg: &IndicatorConfig) -> Option<f64> {
    let energy: Vec<f64> = exp
        .basis
        .gammas()
        .iter()
        .zip(&exp.coeffs)
        .map(|(g, c)| g * c * c)
        .collect();
    tail_share(&energy, cfg.m(exp.basis.n))
}

/// ln ∫_a^∞ (∂_x U)² ρ dx, with ρ the weight of the basis norm.
fn ln_derivative_tail(deriv: &Expansion, source: &ScaledBasis, a: f64) -> Result<f64> {
    let alpha = source.alpha();
    let beta = source.beta;
    let n = source.n;
    let nodes = if alpha == 0.0 { n } else { 4 * (n + 1) - 1 };
    let r = unit_rule(
        BasisFamily::GeneralizedLaguerre { alpha: 0.0 },
        nodes,
        RuleKind::Gauss,
    )?;
    let polynomial = matches!(source.family, BasisFamily::GeneralizedLaguerre { .. });
    let mut terms = Vec::with_capacity(r.xi.len());
    for (s, w) in r.xi.iter().zip(&r.w) {
        let y = s / beta;
        let x = a + y;
        let (m, e) = deriv.eval_scaled(x);
        if m == 0.0 {
            continue;
        }
        let dx = x - source.x_l;
        let mut ln_rho = if alpha == 0.0 { 0.0 } else { alpha * dx.ln() };
        if polynomial {
            ln_rho -= beta * dx;
        }
        terms.push(w.ln() + 2.0 * (m.abs().ln() + e) + ln_rho + beta * y);
    }
    let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !mx.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln() - beta.ln())
}

pub fn exterior_error_indicator(exp: &Expansion, x_r: f64) -> Result<Option<f64>> {
    if !exp.basis.family.is_half_line() {
        return Err(SpectralError::Unsupported(
            "exterior indicator on the whole line",
        ));
    }
    if !(x_r >= exp.basis.x_l) {
        return Err(SpectralError::Domain {
            x: x_r,
            x_l: exp.basis.x_l,
        });
    }
    let d = exp.derivative()?;
    let den = ln_derivative_tail(&d, &exp.basis, exp.basis.x_l)?;
    if !den.is_finite() {
        return Ok(None);
    }
    let num = ln_derivative_tail(&d, &exp.basis, x_r)?;
    Ok(Some((0.5 * (num - den)).exp().min(1.0)))
}

pub fn frequency_indicator_x(exp: &Expansion2D, cfg: &IndicatorConfig) -> Option<f64> {
    tail_share(&exp.weighted_row_energy(Axis(0)), cfg.m(exp.basis_x.n))
}

pub fn frequency_indicator_y(exp: &Expansion2D, cfg: &IndicatorConfig) -> Option<f64> {
    tail_share(&exp.weighted_row_energy(Axis(1)), cfg.m(exp.basis_y.n))
}

pub fn exterior_error_indicator_x(exp: &Expansion2D, x_r: f64) -> Result<Option<f64>> {
    exterior_error_indicator(&exp.marginal_x()?, x_r)
}

pub fn exterior_error_indicator_y(exp: &Expansion2D, y_r: f64) -> Result<Option<f64>> {
    exterior_error_indicator(&exp.marginal_y()?, y_r)
}
