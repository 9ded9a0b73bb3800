//! Orthogonal families on the half-line and the whole line, their scaled and
//! translated variants, Gauss-type quadrature and coefficient-space derivatives.
//!
//! Three families are provided:
//!
//! * `GeneralizedLaguerre` — polynomials L_ℓ^{(α)}(β(x − x_L)), orthogonal under
//!   (x − x_L)^α e^{−β(x − x_L)}.
//! * `LaguerreFunction` — the same polynomials times e^{−β(x − x_L)/2}, orthogonal
//!   under (x − x_L)^α (plain L² when α = 0). Suited to decaying targets, which
//!   the adaptive controllers are built for.
//! * `HermiteFunction` — orthonormal √β·ĥ_ℓ(βx) on the real line.

mod recurrence;
pub(crate) mod rule;
pub mod tridiag;

use std::sync::Arc;

use crate::error::{Result, SpectralError};
pub(crate) use recurrence::{sum as unit_sum, sum_scaled as unit_sum_scaled};
pub(crate) use rule::{unit_rule, UnitRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisFamily {
    GeneralizedLaguerre { alpha: f64 },
    LaguerreFunction { alpha: f64 },
    HermiteFunction,
}

impl BasisFamily {
    pub fn alpha(&self) -> f64 {
        match *self {
            BasisFamily::GeneralizedLaguerre { alpha }
            | BasisFamily::LaguerreFunction { alpha } => alpha,
            BasisFamily::HermiteFunction => 0.0,
        }
    }

    pub fn is_half_line(&self) -> bool {
        !matches!(self, BasisFamily::HermiteFunction)
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        match self {
            BasisFamily::GeneralizedLaguerre { .. } => BasisFamily::GeneralizedLaguerre { alpha },
            BasisFamily::LaguerreFunction { .. } => BasisFamily::LaguerreFunction { alpha },
            BasisFamily::HermiteFunction => BasisFamily::HermiteFunction,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BasisFamily::GeneralizedLaguerre { .. } => "laguerre",
            BasisFamily::LaguerreFunction { .. } => "laguerre-fn",
            BasisFamily::HermiteFunction => "hermite",
        }
    }

    pub fn from_name(name: &str, alpha: f64) -> Result<Self> {
        match name {
            "laguerre" => Ok(BasisFamily::GeneralizedLaguerre { alpha }),
            "laguerre-fn" => Ok(BasisFamily::LaguerreFunction { alpha }),
            "hermite" => Ok(BasisFamily::HermiteFunction),
            other => Err(SpectralError::Parse(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Gauss,
    GaussRadau,
}

/// A family with scaling β, left end x_L and order N (N+1 functions).
///
/// `nodes_kind` selects which rule supplies the collocation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBasis {
    pub family: BasisFamily,
    pub beta: f64,
    pub x_l: f64,
    pub n: usize,
    pub nodes_kind: RuleKind,
}

impl ScaledBasis {
    pub fn new(family: BasisFamily, beta: f64, x_l: f64, n: usize) -> Result<Self> {
        let alpha = family.alpha();
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(SpectralError::InvalidParameter(format!(
                "alpha = {alpha} must exceed -1"
            )));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SpectralError::InvalidParameter(format!(
                "beta = {beta} must be positive"
            )));
        }
        if n < 1 {
            return Err(SpectralError::InvalidParameter(
                "order N must be at least 1".into(),
            ));
        }
        if !x_l.is_finite() || (!family.is_half_line() && x_l != 0.0) {
            return Err(SpectralError::InvalidParameter(format!(
                "x_L = {x_l} not allowed"
            )));
        }
        Ok(Self {
            family,
            beta,
            x_l,
            n,
            nodes_kind: RuleKind::Gauss,
        })
    }

    pub fn laguerre(alpha: f64, beta: f64, x_l: f64, n: usize) -> Result<Self> {
        Self::new(BasisFamily::GeneralizedLaguerre { alpha }, beta, x_l, n)
    }

    pub fn laguerre_function(alpha: f64, beta: f64, x_l: f64, n: usize) -> Result<Self> {
        Self::new(BasisFamily::LaguerreFunction { alpha }, beta, x_l, n)
    }

    pub fn hermite(beta: f64, n: usize) -> Result<Self> {
        Self::new(BasisFamily::HermiteFunction, beta, 0.0, n)
    }

    /// Collocate on Gauss-Radau points (first node at x_L).
    pub fn radau(mut self) -> Result<Self> {
        if !self.family.is_half_line() {
            return Err(SpectralError::Unsupported(
                "Gauss-Radau rule on the whole line",
            ));
        }
        self.nodes_kind = RuleKind::GaussRadau;
        Ok(self)
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        assert!(
            beta > 0.0 && beta.is_finite(),
            "scaling factor must be positive, got {beta}"
        );
        Self { beta, ..*self }
    }

    pub fn with_x_l(&self, x_l: f64) -> Self {
        assert!(self.family.is_half_line() || x_l == 0.0);
        Self { x_l, ..*self }
    }

    pub fn with_order(&self, n: usize) -> Self {
        assert!(n >= 1);
        Self { n, ..*self }
    }

    pub fn alpha(&self) -> f64 {
        self.family.alpha()
    }

    pub fn size(&self) -> usize {
        self.n + 1
    }

    /// Unit-scale argument of x.
    #[inline]
    pub fn unit_arg(&self, x: f64) -> f64 {
        self.beta * (x - self.x_l)
    }

    /// Factor between unit-scale and scaled function values (√β for Hermite).
    #[inline]
    pub(crate) fn amplitude(&self) -> f64 {
        match self.family {
            BasisFamily::HermiteFunction => self.beta.sqrt(),
            _ => 1.0,
        }
    }

    /// β^{α+1} for Laguerre, β for Hermite: the Jacobian of the unit map.
    #[inline]
    pub(crate) fn jacobian(&self) -> f64 {
        match self.family {
            BasisFamily::HermiteFunction => self.beta,
            f => self.beta.powf(f.alpha() + 1.0),
        }
    }

    pub(crate) fn check_domain(&self, x: f64) -> Result<()> {
        if self.family.is_half_line() && x < self.x_l {
            return Err(SpectralError::Domain { x, x_l: self.x_l });
        }
        Ok(())
    }

    pub fn eval_all(&self, x: f64) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        let amp = self.amplitude();
        let mut v = recurrence::values(self.family, self.unit_arg(x), self.n);
        if amp != 1.0 {
            v.iter_mut().for_each(|e| *e *= amp);
        }
        Ok(v)
    }

    pub fn gamma(&self, l: usize) -> f64 {
        match self.family {
            BasisFamily::HermiteFunction => 1.0,
            f => {
                let alpha = f.alpha();
                let mut g = statrs::function::gamma::gamma(alpha + 1.0);
                for k in 1..=l {
                    g *= (k as f64 + alpha) / k as f64;
                }
                g / self.jacobian()
            }
        }
    }

    pub fn gammas(&self) -> Vec<f64> {
        if self.family == BasisFamily::HermiteFunction {
            return vec![1.0; self.size()];
        }
        let jac = self.jacobian();
        rule::ln_gammas(self.family, self.n)
            .into_iter()
            .map(|lg| lg.exp() / jac)
            .collect()
    }

    pub(crate) fn unit(&self) -> Result<Arc<UnitRule>> {
        unit_rule(self.family, self.n, self.nodes_kind)
    }

    pub fn quadrature(&self, kind: RuleKind) -> Result<QuadratureRule> {
        let u = unit_rule(self.family, self.n, kind)?;
        let jac = self.jacobian();
        Ok(QuadratureRule {
            kind,
            nodes: u.xi.iter().map(|s| s / self.beta + self.x_l).collect(),
            weights: u.w.iter().map(|w| w / jac).collect(),
            plain_weights: u.w_plain.iter().map(|w| w / jac).collect(),
            basis: *self,
        })
    }

    /// Collocation nodes (of `nodes_kind`).
    pub fn nodes(&self) -> Result<Vec<f64>> {
        let u = self.unit()?;
        Ok(u.xi.iter().map(|s| s / self.beta + self.x_l).collect())
    }
}

/// Nodes and positive weights of a Gauss-type rule on a scaled basis.
///
/// `weights` integrate against the family weight ((x−x_L)^α e^{−β(x−x_L)} on
/// the half-line, e^{−β²x²} on the line); `plain_weights` integrate against
/// (x−x_L)^α, respectively 1, for functions that decay on their own.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub plain_weights: Vec<f64>,
    pub basis: ScaledBasis,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_plain<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.plain_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

pub fn eval_basis_all(basis: &ScaledBasis, x: f64) -> Result<Vec<f64>> {
    basis.eval_all(x)
}

pub fn gamma_norm(basis: &ScaledBasis, l: usize) -> f64 {
    basis.gamma(l)
}

pub fn quadrature(basis: &ScaledBasis, kind: RuleKind) -> Result<QuadratureRule> {
    basis.quadrature(kind)
}

/// Coefficients of ∂_x U and the basis they live in.
///
/// Laguerre polynomials drop one order and shift α → α+1; Laguerre functions
/// keep the order and shift α → α+1; Hermite functions gain one order.
pub fn derivative_coeffs(coeffs: &[f64], basis: &ScaledBasis) -> Result<(Vec<f64>, ScaledBasis)> {
    let n = basis.n;
    if coeffs.len() != n + 1 {
        return Err(SpectralError::LengthMismatch {
            expected: n + 1,
            got: coeffs.len(),
        });
    }
    let b = basis.beta;
    let c = |k: usize| if k <= n { coeffs[k] } else { 0.0 };
    Ok(match basis.family {
        BasisFamily::GeneralizedLaguerre { alpha } => {
            let order = (n - 1).max(1);
            let d = (0..=order).map(|m| -b * c(m + 1)).collect();
            let db = ScaledBasis {
                family: BasisFamily::GeneralizedLaguerre { alpha: alpha + 1.0 },
                n: order,
                ..*basis
            };
            (d, db)
        }
        BasisFamily::LaguerreFunction { alpha } => {
            let d = (0..=n).map(|m| -0.5 * b * (c(m) + c(m + 1))).collect();
            let db = ScaledBasis {
                family: BasisFamily::LaguerreFunction { alpha: alpha + 1.0 },
                ..*basis
            };
            (d, db)
        }
        BasisFamily::HermiteFunction => {
            let d = (0..=n + 1)
                .map(|m| {
                    let up = ((m + 1) as f64 / 2.0).sqrt() * c(m + 1);
                    let down = if m == 0 {
                        0.0
                    } else {
                        (m as f64 / 2.0).sqrt() * c(m - 1)
                    };
                    b * (up - down)
                })
                .collect();
            (d, ScaledBasis { n: n + 1, ..*basis })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_values_at_origin_are_one() {
        let b = ScaledBasis::laguerre(0.0, 1.0, 0.0, 12).unwrap();
        assert!(b
            .eval_all(0.0)
            .unwrap()
            .iter()
            .all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn scaled_argument() {
        let b = ScaledBasis::laguerre(0.0, 2.0, 0.0, 3).unwrap();
        assert!(b.eval_all(0.5).unwrap()[1].abs() < 1e-15);
    }

    #[test]
    fn left_of_domain_is_rejected() {
        let b = ScaledBasis::laguerre(0.0, 1.0, 1.0, 3).unwrap();
        assert!(matches!(b.eval_all(0.5), Err(SpectralError::Domain { .. })));
    }

    #[test]
    fn invalid_parameters() {
        assert!(ScaledBasis::laguerre(-1.0, 1.0, 0.0, 3).is_err());
        assert!(ScaledBasis::laguerre(0.0, 0.0, 0.0, 3).is_err());
        assert!(ScaledBasis::laguerre(0.0, 1.0, 0.0, 0).is_err());
        assert!(ScaledBasis::new(BasisFamily::HermiteFunction, 1.0, 1.0, 3).is_err());
        assert!(ScaledBasis::hermite(1.0, 4).unwrap().radau().is_err());
    }

    #[test]
    fn two_point_gauss_laguerre() {
        let r = ScaledBasis::laguerre(0.0, 1.0, 0.0, 1)
            .unwrap()
            .quadrature(RuleKind::Gauss)
            .unwrap();
        let s = 2f64.sqrt();
        assert!((r.nodes[0] - (2.0 - s)).abs() < 1e-15);
        assert!((r.nodes[1] - (2.0 + s)).abs() < 1e-14);
        assert!((r.weights[0] - (2.0 + s) / 4.0).abs() < 1e-15);
        assert!((r.weights[1] - (2.0 - s) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_radau() {
        let r = ScaledBasis::laguerre(0.0, 1.0, 0.0, 1)
            .unwrap()
            .quadrature(RuleKind::GaussRadau)
            .unwrap();
        assert_eq!(r.nodes[0], 0.0);
        assert!((r.nodes[1] - 2.0).abs() < 1e-14);
        assert!((r.weights[0] - 0.5).abs() < 1e-15 && (r.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_closed_forms() {
        let b = ScaledBasis::laguerre(0.0, 1.0, 0.0, 8).unwrap();
        assert!((0..=8).all(|l| (b.gamma(l) - 1.0).abs() < 1e-15));
        let b = ScaledBasis::laguerre(0.0, 2.0, 0.0, 8).unwrap();
        assert!((b.gamma(3) - 0.5).abs() < 1e-15);
        let g = b.gammas();
        assert!((g[3] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn laguerre_function_derivative_identity() {
        // U = e^{-x/2}: only c_0 = 1, derivative -U/2 = -½ L_0^{(1)} e^{-x/2}
        let b = ScaledBasis::laguerre_function(0.0, 1.0, 0.0, 4).unwrap();
        let (d, db) = derivative_coeffs(&[1.0, 0.0, 0.0, 0.0, 0.0], &b).unwrap();
        assert_eq!(db.family, BasisFamily::LaguerreFunction { alpha: 1.0 });
        assert_eq!(d, vec![-0.5, 0.0, 0.0, 0.0, 0.0]);
    }
}
