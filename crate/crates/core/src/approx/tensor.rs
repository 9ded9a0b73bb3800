use ndarray::{Array1, Array2, Axis};

use super::{mode_integrals, Expansion};
use crate::basis::{unit_rule, RuleKind, ScaledBasis};
use crate::error::{Result, SpectralError};

/// Tensor-product expansion U(x, y) = Σ u_{ℓm} φ_ℓ(x) ψ_m(y).
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion2D {
    pub basis_x: ScaledBasis,
    pub basis_y: ScaledBasis,
    pub coeffs: Array2<f64>,
}

/// Physical transform matrix T (size×size): coefficients = T·values.
pub(crate) fn transform_matrix(basis: &ScaledBasis) -> Result<Array2<f64>> {
    let u = basis.unit()?;
    let size = basis.size();
    let inv = 1.0 / basis.amplitude();
    Ok(
        Array2::from_shape_vec((size, size), u.transform.iter().map(|t| t * inv).collect())
            .expect("square table"),
    )
}

/// Φ[i][ℓ] = φ_ℓ(x_i) for arbitrary points.
pub(crate) fn value_matrix(basis: &ScaledBasis, xs: &[f64]) -> Array2<f64> {
    let size = basis.size();
    let mut m = Array2::zeros((xs.len(), size));
    for (i, &x) in xs.iter().enumerate() {
        let v = super::unit_values(basis.family, basis.unit_arg(x), basis.n);
        let amp = basis.amplitude();
        for l in 0..size {
            m[[i, l]] = v[l] * amp;
        }
    }
    m
}

impl Expansion2D {
    pub fn new(basis_x: ScaledBasis, basis_y: ScaledBasis, coeffs: Array2<f64>) -> Result<Self> {
        let shape = (basis_x.size(), basis_y.size());
        if coeffs.dim() != shape {
            return Err(SpectralError::LengthMismatch {
                expected: shape.0 * shape.1,
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SpectralError::NonFinite("2D coefficient".into()));
        }
        Ok(Self {
            basis_x,
            basis_y,
            coeffs,
        })
    }

    /// Transform of values on the node grid (rows: x-nodes, columns: y-nodes).
    pub fn interpolate(
        values: &Array2<f64>,
        basis_x: ScaledBasis,
        basis_y: ScaledBasis,
    ) -> Result<Self> {
        if values.dim() != (basis_x.size(), basis_y.size()) {
            return Err(SpectralError::LengthMismatch {
                expected: basis_x.size() * basis_y.size(),
                got: values.len(),
            });
        }
        let tx = transform_matrix(&basis_x)?;
        let ty = transform_matrix(&basis_y)?;
        Self::new(basis_x, basis_y, tx.dot(values).dot(&ty.t()))
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(
        basis_x: ScaledBasis,
        basis_y: ScaledBasis,
        f: F,
    ) -> Result<Self> {
        let xs = basis_x.nodes()?;
        let ys = basis_y.nodes()?;
        let values = Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| f(xs[i], ys[j]));
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite("2D sample".into()));
        }
        Self::interpolate(&values, basis_x, basis_y)
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        self.basis_x.check_domain(x)?;
        self.basis_y.check_domain(y)?;
        let g = self.evaluate_grid(&[x], &[y]);
        Ok(g[[0, 0]])
    }

    /// Values on the Cartesian grid xs × ys.
    pub fn evaluate_grid(&self, xs: &[f64], ys: &[f64]) -> Array2<f64> {
        let px = value_matrix(&self.basis_x, xs);
        let py = value_matrix(&self.basis_y, ys);
        px.dot(&self.coeffs).dot(&py.t())
    }

    pub fn node_values(&self) -> Result<Array2<f64>> {
        Ok(self.evaluate_grid(&self.basis_x.nodes()?, &self.basis_y.nodes()?))
    }

    fn resample_x(&self, target: ScaledBasis) -> Result<Self> {
        let px = value_matrix(&self.basis_x, &target.nodes()?);
        let tx = transform_matrix(&target)?;
        Self::new(target, self.basis_y, tx.dot(&px.dot(&self.coeffs)))
    }

    fn resample_y(&self, target: ScaledBasis) -> Result<Self> {
        let py = value_matrix(&self.basis_y, &target.nodes()?);
        let ty = transform_matrix(&target)?;
        Self::new(self.basis_x, target, self.coeffs.dot(&py.t()).dot(&ty.t()))
    }

    pub fn rescale_x(&self, beta: f64) -> Result<Self> {
        if beta == self.basis_x.beta {
            return Ok(self.clone());
        }
        self.resample_x(self.basis_x.with_beta(beta))
    }

    pub fn rescale_y(&self, beta: f64) -> Result<Self> {
        if beta == self.basis_y.beta {
            return Ok(self.clone());
        }
        self.resample_y(self.basis_y.with_beta(beta))
    }

    pub fn move_x(&self, d0: f64) -> Result<Self> {
        if d0 == 0.0 {
            return Ok(self.clone());
        }
        self.resample_x(self.basis_x.with_x_l(self.basis_x.x_l + d0))
    }

    pub fn move_y(&self, d0: f64) -> Result<Self> {
        if d0 == 0.0 {
            return Ok(self.clone());
        }
        self.resample_y(self.basis_y.with_x_l(self.basis_y.x_l + d0))
    }

    /// Relative error on the product of 2(N+1)-node rules in each direction.
    pub fn relative_error<F: Fn(f64, f64) -> f64>(&self, reference: F) -> Result<f64> {
        let (xs, wx) = fine_rule(&self.basis_x)?;
        let (ys, wy) = fine_rule(&self.basis_y)?;
        let u = self.evaluate_grid(&xs, &ys);
        let (mut num, mut den) = (0.0, 0.0);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let r = reference(x, y);
                if !r.is_finite() {
                    return Err(SpectralError::NonFinite(format!("reference at ({x}, {y})")));
                }
                let w = wx[i] * wy[j];
                let e = u[[i, j]] - r;
                num += w * e * e;
                den += w * r * r;
            }
        }
        Ok((num / den).sqrt())
    }

    pub fn to_text(&self) -> String {
        super::text::write_2d(self)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        super::text::read_2d(s)
    }
}

fn fine_rule(b: &ScaledBasis) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = unit_rule(b.family, 2 * b.n + 1, RuleKind::Gauss)?;
    let w = super::norm_weights(b.family, &r.w, &r.w_plain);
    let jac = b.jacobian();
    Ok((
        r.xi.iter().map(|s| s / b.beta + b.x_l).collect(),
        w.iter().map(|w| w / jac).collect(),
    ))
}

/// ∫ U(x, y) dy as an expansion in x.
pub fn marginal_x(exp: &Expansion2D) -> Result<Expansion> {
    let m = Array1::from(mode_integrals(&exp.basis_y)?);
    Expansion::new(exp.basis_x, exp.coeffs.dot(&m).to_vec())
}

/// ∫ U(x, y) dx as an expansion in y.
pub fn marginal_y(exp: &Expansion2D) -> Result<Expansion> {
    let m = Array1::from(mode_integrals(&exp.basis_x)?);
    Expansion::new(exp.basis_y, exp.coeffs.t().dot(&m).to_vec())
}

impl Expansion2D {
    pub fn marginal_x(&self) -> Result<Expansion> {
        marginal_x(self)
    }

    pub fn marginal_y(&self) -> Result<Expansion> {
        marginal_y(self)
    }

    /// Sum of squared coefficients weighted by γ_ℓ γ_m, grouped along `axis`.
    pub(crate) fn weighted_row_energy(&self, axis: Axis) -> Vec<f64> {
        let gx = self.basis_x.gammas();
        let gy = self.basis_y.gammas();
        let mut out = vec![0.0; self.coeffs.len_of(axis)];
        for ((l, m), c) in self.coeffs.indexed_iter() {
            let e = gx[l] * gy[m] * c * c;
            match axis {
                Axis(0) => out[l] += e,
                _ => out[m] += e,
            }
        }
        out
    }
}
