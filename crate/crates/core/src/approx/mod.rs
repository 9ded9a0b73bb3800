//! Spectral expansions: interpolation at collocation nodes, evaluation,
//! rescaling, translation, norms and errors, in one and two dimensions.

mod tensor;
mod text;

pub use tensor::{marginal_x, marginal_y, Expansion2D};

use crate::basis::{
    self, unit_rule, unit_sum, unit_sum_scaled, BasisFamily, RuleKind, ScaledBasis,
};
use crate::error::{Result, SpectralError};

/// Coefficients u_ℓ of U = Σ u_ℓ φ_ℓ against a scaled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub basis: ScaledBasis,
    pub coeffs: Vec<f64>,
}

impl Expansion {
    pub fn new(basis: ScaledBasis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.size() {
            return Err(SpectralError::LengthMismatch {
                expected: basis.size(),
                got: coeffs.len(),
            });
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SpectralError::NonFinite(format!("coefficient {k}")));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: ScaledBasis) -> Self {
        Self {
            basis,
            coeffs: vec![0.0; basis.size()],
        }
    }

    /// Discrete transform of values sampled at the collocation nodes.
    pub fn interpolate(values: &[f64], basis: ScaledBasis) -> Result<Self> {
        let size = basis.size();
        if values.len() != size {
            return Err(SpectralError::LengthMismatch {
                expected: size,
                got: values.len(),
            });
        }
        let u = basis.unit()?;
        let inv_amp = 1.0 / basis.amplitude();
        let coeffs = (0..size)
            .map(|l| {
                let row = &u.transform[l * size..(l + 1) * size];
                inv_amp * row.iter().zip(values).map(|(t, v)| t * v).sum::<f64>()
            })
            .collect();
        Self::new(basis, coeffs)
    }

    /// Interpolant of `f` on the collocation nodes of `basis`.
    pub fn from_fn<F: Fn(f64) -> f64>(basis: ScaledBasis, f: F) -> Result<Self> {
        let values: Vec<f64> = basis.nodes()?.into_iter().map(f).collect();
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite(format!("sample at node {k}")));
        }
        Self::interpolate(&values, basis)
    }

    pub fn order(&self) -> usize {
        self.basis.n
    }

    pub fn beta(&self) -> f64 {
        self.basis.beta
    }

    pub fn x_l(&self) -> f64 {
        self.basis.x_l
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.basis.check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub fn evaluate_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.evaluate(x)).collect()
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        self.basis.amplitude() * unit_sum(self.basis.family, self.basis.unit_arg(x), &self.coeffs)
    }

    /// U(x) as mantissa·e^{exponent}, immune to under/overflow of the weight factor.
    pub(crate) fn eval_scaled(&self, x: f64) -> (f64, f64) {
        let (m, e) = unit_sum_scaled(self.basis.family, self.basis.unit_arg(x), &self.coeffs);
        (m * self.basis.amplitude(), e)
    }

    /// U at its own collocation nodes.
    pub fn node_values(&self) -> Result<Vec<f64>> {
        let size = self.basis.size();
        let u = self.basis.unit()?;
        let amp = self.basis.amplitude();
        Ok((0..size)
            .map(|j| {
                let row = &u.values[j * size..(j + 1) * size];
                amp * row
                    .iter()
                    .zip(&self.coeffs)
                    .map(|(v, c)| v * c)
                    .sum::<f64>()
            })
            .collect())
    }

    /// Re-interpolate on the basis with scaling factor `beta`.
    pub fn rescale(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SpectralError::InvalidParameter(format!("beta = {beta}")));
        }
        if beta == self.basis.beta {
            return Ok(self.clone());
        }
        self.resample(self.basis.with_beta(beta))
    }

    /// Re-interpolate on the basis translated right by `d0`.
    pub fn move_by(&self, d0: f64) -> Result<Self> {
        if !(d0 >= 0.0) || !d0.is_finite() {
            return Err(SpectralError::InvalidParameter(format!(
                "displacement {d0}"
            )));
        }
        if !self.basis.family.is_half_line() {
            return Err(SpectralError::Unsupported(
                "translation of a whole-line basis",
            ));
        }
        if d0 == 0.0 {
            return Ok(self.clone());
        }
        self.resample(self.basis.with_x_l(self.basis.x_l + d0))
    }

    /// Evaluate at the nodes of `target` and interpolate there.
    pub fn resample(&self, target: ScaledBasis) -> Result<Self> {
        let values: Vec<f64> = target
            .nodes()?
            .iter()
            .map(|&x| self.eval_unchecked(x))
            .collect();
        Self::interpolate(&values, target)
    }

    /// (Σ γ_ℓ u_ℓ²)^{1/2}.
    pub fn weighted_norm(&self) -> f64 {
        self.basis
            .gammas()
            .iter()
            .zip(&self.coeffs)
            .map(|(g, c)| g * c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn derivative(&self) -> Result<Self> {
        let (d, b) = basis::derivative_coeffs(&self.coeffs, &self.basis)?;
        Ok(Self {
            basis: b,
            coeffs: d,
        })
    }

    /// Copy with coefficients above index `keep` zeroed.
    pub fn truncated(&self, keep: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.iter_mut().skip(keep + 1).for_each(|v| *v = 0.0);
        Self {
            basis: self.basis,
            coeffs: c,
        }
    }

    /// Relative error ‖U − u‖/‖u‖ in the basis norm, by a 2(N+1)-node rule.
    pub fn relative_error<F: Fn(f64) -> f64>(&self, reference: F) -> Result<f64> {
        let (num, den) = self.error_sums(reference)?;
        Ok((num / den).sqrt())
    }

    /// Squared error and squared reference norm, unnormalized.
    pub fn error_sums<F: Fn(f64) -> f64>(&self, reference: F) -> Result<(f64, f64)> {
        let b = &self.basis;
        let fine = unit_rule(b.family, 2 * b.n + 1, RuleKind::Gauss)?;
        let ws = norm_weights(b.family, &fine.w, &fine.w_plain);
        let (mut num, mut den) = (0.0, 0.0);
        for (s, w) in fine.xi.iter().zip(ws) {
            let x = s / b.beta + b.x_l;
            let u = reference(x);
            if !u.is_finite() {
                return Err(SpectralError::NonFinite(format!("reference at x = {x}")));
            }
            let e = self.eval_unchecked(x) - u;
            num += w * e * e;
            den += w * u * u;
        }
        let jac = b.jacobian();
        Ok((num / jac, den / jac))
    }

    /// Nodal differentiation matrix (row-major, size²): (∂_x U)(x_j) = Σ_k D_jk U(x_k).
    pub fn differentiation_matrix(basis: &ScaledBasis) -> Result<Vec<f64>> {
        let size = basis.size();
        let nodes = basis.nodes()?;
        let u = basis.unit()?;
        let mut dv = vec![0.0; size * size];
        for l in 0..size {
            let mut e = vec![0.0; size];
            e[l] = 1.0;
            let d = Expansion {
                basis: *basis,
                coeffs: e,
            }
            .derivative()?;
            for (j, &x) in nodes.iter().enumerate() {
                dv[j * size + l] = d.eval_unchecked(x);
            }
        }
        // D = V'·T, with T the (amplitude-corrected) transform
        let inv_amp = 1.0 / basis.amplitude();
        let mut out = vec![0.0; size * size];
        for j in 0..size {
            for k in 0..size {
                let mut acc = 0.0;
                for l in 0..size {
                    acc += dv[j * size + l] * u.transform[l * size + k];
                }
                out[j * size + k] = acc * inv_amp;
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        text::write_1d(self)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        text::read_1d(s)
    }
}

/// Weights of the norm in which a family is orthogonal.
pub(crate) fn norm_weights<'a>(family: BasisFamily, w: &'a [f64], w_plain: &'a [f64]) -> &'a [f64] {
    match family {
        BasisFamily::GeneralizedLaguerre { .. } => w,
        _ => w_plain,
    }
}

/// ∫ φ_ℓ over the basis domain for ℓ = 0..N, without weight.
///
/// Exact for Laguerre and Hermite functions (half-width Gauss rules); for
/// Laguerre polynomials the integral only exists for decaying expansions and
/// is taken by exponential reweighting of the collocation rule.
pub fn mode_integrals(basis: &ScaledBasis) -> Result<Vec<f64>> {
    let n = basis.n;
    match basis.family {
        BasisFamily::LaguerreFunction { .. } => tail_integrals(basis, basis.x_l),
        BasisFamily::HermiteFunction => {
            // ∫ ĥ_ℓ(y) dy = √2 ∫ h̃_ℓ(√2 z) e^{-z²} dz
            let r = unit_rule(BasisFamily::HermiteFunction, n, RuleKind::Gauss)?;
            let mut out = vec![0.0; n + 1];
            for (z, w) in r.xi.iter().zip(&r.w) {
                let s = std::f64::consts::SQRT_2 * z;
                // polynomial parts: undo e^{-s²/2}
                let vals = unit_values(BasisFamily::HermiteFunction, s, n);
                let undo = (0.5 * s * s).exp();
                for (o, v) in out.iter_mut().zip(vals) {
                    *o += w * v * undo;
                }
            }
            let scale = std::f64::consts::SQRT_2 / basis.beta.sqrt();
            Ok(out.into_iter().map(|v| v * scale).collect())
        }
        BasisFamily::GeneralizedLaguerre { .. } => {
            let q = basis.quadrature(basis.nodes_kind)?;
            let mut out = vec![0.0; n + 1];
            for (x, w) in q.nodes.iter().zip(&q.plain_weights) {
                let s = basis.unit_arg(*x);
                let rho = (s / basis.beta).powf(basis.alpha());
                let rho = if rho > 0.0 { rho } else { 1.0 };
                let vals = unit_values(basis.family, s, n);
                for (o, v) in out.iter_mut().zip(vals) {
                    *o += w / rho * v;
                }
            }
            Ok(out)
        }
    }
}

pub(crate) fn unit_values(family: BasisFamily, s: f64, n: usize) -> Vec<f64> {
    let b = ScaledBasis {
        family,
        beta: 1.0,
        x_l: 0.0,
        n,
        nodes_kind: RuleKind::Gauss,
    };
    b.eval_all(s).unwrap_or_else(|_| vec![0.0; n + 1])
}

/// ∫_a^∞ φ_ℓ(x) dx for Laguerre functions, exact: the substitution
/// x = a + 2z/β turns each integral into a Gauss-Laguerre sum of a polynomial.
pub fn tail_integrals(basis: &ScaledBasis, a: f64) -> Result<Vec<f64>> {
    tail_moments(basis, a, 0)
}

/// ∫_a^∞ x^k φ_ℓ(x) dx for Laguerre functions (exact while k ≤ N + 1).
pub fn tail_moments(basis: &ScaledBasis, a: f64, k: i32) -> Result<Vec<f64>> {
    if !matches!(basis.family, BasisFamily::LaguerreFunction { .. }) {
        return Err(SpectralError::Unsupported(
            "tail integrals need Laguerre functions",
        ));
    }
    basis.check_domain(a)?;
    let n = basis.n;
    let poly = BasisFamily::GeneralizedLaguerre {
        alpha: basis.alpha(),
    };
    let r = unit_rule(
        BasisFamily::GeneralizedLaguerre { alpha: 0.0 },
        n,
        RuleKind::Gauss,
    )?;
    let s0 = basis.unit_arg(a);
    let mut out = vec![0.0; n + 1];
    for (z, w) in r.xi.iter().zip(&r.w) {
        let vals = unit_values(poly, s0 + 2.0 * z, n);
        let xk = (a + 2.0 * z / basis.beta).powi(k);
        for (o, v) in out.iter_mut().zip(vals) {
            *o += w * xk * v;
        }
    }
    let scale = 2.0 / basis.beta * (-0.5 * s0).exp();
    Ok(out.into_iter().map(|v| v * scale).collect())
}

pub fn interpolate(values: &[f64], basis: ScaledBasis) -> Result<Expansion> {
    Expansion::interpolate(values, basis)
}

pub fn evaluate(exp: &Expansion, x: f64) -> Result<f64> {
    exp.evaluate(x)
}

pub fn rescale(exp: &Expansion, beta: f64) -> Result<Expansion> {
    exp.rescale(beta)
}

pub fn move_expansion(exp: &Expansion, d0: f64) -> Result<Expansion> {
    exp.move_by(d0)
}

pub fn weighted_norm(exp: &Expansion) -> f64 {
    exp.weighted_norm()
}

pub fn relative_error<F: Fn(f64) -> f64>(exp: &Expansion, reference: F) -> Result<f64> {
    exp.relative_error(reference)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lag(n: usize) -> ScaledBasis {
        ScaledBasis::laguerre(0.0, 1.0, 0.0, n).unwrap()
    }

    #[test]
    fn constant_interpolates_to_first_mode() {
        let e = Expansion::from_fn(lag(10), |_| 1.0).unwrap();
        assert!((e.coeffs[0] - 1.0).abs() < 1e-12);
        assert!(e.coeffs[1..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn basis_reproduction() {
        let b = lag(8);
        let e = Expansion::from_fn(b, |x| b.eval_all(x).unwrap()[3]).unwrap();
        for (l, c) in e.coeffs.iter().enumerate() {
            let want = if l == 3 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-12, "{l}: {c}");
        }
    }

    #[test]
    fn exponential_interpolant() {
        let b = ScaledBasis::laguerre_function(0.0, 1.0, 0.0, 20).unwrap();
        let e = Expansion::from_fn(b, |x| (-x).exp()).unwrap();
        for k in 0..10 {
            let x = 0.37 + 1.3 * k as f64;
            assert!((e.evaluate(x).unwrap() - (-x).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn trivial_evaluations() {
        let b = lag(5);
        assert_eq!(Expansion::zeros(b).evaluate(3.0).unwrap(), 0.0);
        let mut c = vec![0.0; 6];
        c[0] = 1.0;
        assert!((Expansion::new(b, c).unwrap().evaluate(7.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_rescale_and_move() {
        let e = Expansion::from_fn(lag(12), |x| (-0.7 * x).exp() * x.cos()).unwrap();
        assert_eq!(e.rescale(1.0).unwrap(), e);
        assert_eq!(e.move_by(0.0).unwrap(), e);
    }

    #[test]
    fn mode_integrals_of_laguerre_functions() {
        let b = ScaledBasis::laguerre_function(0.0, 2.0, 1.0, 6).unwrap();
        let m = mode_integrals(&b).unwrap();
        for (l, v) in m.iter().enumerate() {
            let want = if l % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - want).abs() < 1e-13, "{l}: {v}");
        }
    }

    #[test]
    fn hermite_mode_integrals() {
        // ∫ ĥ_0 = π^{-1/4}·√(2π), scaled by β^{-1/2}
        let b = ScaledBasis::hermite(0.5, 4).unwrap();
        let m = mode_integrals(&b).unwrap();
        let want =
            std::f64::consts::PI.powf(-0.25) * (2.0 * std::f64::consts::PI).sqrt() / 0.5f64.sqrt();
        assert!((m[0] - want).abs() < 1e-13);
        assert!(m[1].abs() < 1e-13 && m[3].abs() < 1e-13);
    }

    #[test]
    fn differentiation_matrix_on_exponential() {
        let b = ScaledBasis::laguerre_function(0.0, 1.5, 0.0, 24).unwrap();
        let d = Expansion::differentiation_matrix(&b).unwrap();
        let x = b.nodes().unwrap();
        let v: Vec<f64> = x.iter().map(|x| (-x).exp()).collect();
        for j in 0..b.size() {
            let dj: f64 = (0..b.size()).map(|k| d[j * b.size() + k] * v[k]).sum();
            assert!((dj + v[j]).abs() < 1e-9, "{j}");
        }
    }
}
