//! Sizer-timer cell population model
//!
//!   n_t + n_a + (g n)_x − ½(σ n)_xx = −D n,
//!   n(0, x, t) = 2 ∫₀^∞ ∫_x^∞ D̃(a, y, x, t) n(a, y, t) dy da,
//!
//! on Laguerre functions over Gauss-Radau nodes in age a and size x.

use ndarray::{Array1, Array2, Axis};

use crate::adapt::{step_count, AdaptConfig, Table};
use crate::approx::{tail_integrals, tail_moments, Expansion, Expansion2D};
use crate::basis::ScaledBasis;
use crate::error::{Result, SpectralError};
use crate::indicators::{frequency_indicator_x, frequency_indicator_y};

/// Coefficient function of (a, x, t).
pub type Field = fn(f64, f64, f64) -> f64;
/// Division kernel D̃(a, y, x, t).
pub type Kernel = fn(f64, f64, f64, f64) -> f64;

#[derive(Debug, Clone, Copy)]
pub struct CellModelConfig {
    pub n: usize,
    pub beta_a: f64,
    pub beta_x: f64,
    pub dt: f64,
    pub t_end: f64,
    pub growth: Field,
    pub sigma: Field,
    pub death: Field,
    pub division: Kernel,
    /// Set when D̃ depends on t only; the birth integral then collapses to
    /// precomputed vectors.
    pub division_depends_on_t_only: bool,
    /// Data for n(a, x, 0) and for the x = 0 boundary.
    pub boundary: Field,
    pub exact: Option<Field>,
    pub scale_x: bool,
    pub scale_a: bool,
    pub adapt: AdaptConfig,
}

fn example_growth(_a: f64, _x: f64, t: f64) -> f64 {
    t + 7.0
}
fn example_sigma(_a: f64, x: f64, t: f64) -> f64 {
    2.0 * (t + 6.0) * x
}
fn example_death(_a: f64, x: f64, t: f64) -> f64 {
    x / (t + 5.0)
}
fn example_division(_a: f64, _y: f64, _x: f64, t: f64) -> f64 {
    1.0 / (t + 5.0)
}

impl CellModelConfig {
    /// g = t+7, σ = 2(t+6)x, D = x/(t+5), D̃ = 1/(t+5); exact solution
    /// e^t e^{−2a} e^{−x/(5+t)}.
    pub fn example() -> Self {
        Self {
            n: 20,
            beta_a: 1.0,
            beta_x: 0.9,
            dt: 0.002,
            t_end: 10.0,
            growth: example_growth,
            sigma: example_sigma,
            death: example_death,
            division: example_division,
            division_depends_on_t_only: true,
            boundary: super::references::cell_density,
            exact: Some(super::references::cell_density),
            scale_x: true,
            scale_a: false,
            adapt: AdaptConfig::default(),
        }
    }
}

/// Per-direction operators for one scaled basis.
#[derive(Debug, Clone)]
struct Direction {
    basis: ScaledBasis,
    nodes: Vec<f64>,
    /// Nodal differentiation matrix.
    d: Array2<f64>,
    /// ∫₀^∞ φ_ℓ.
    integrals: Array1<f64>,
    /// ∫₀^∞ x φ_ℓ.
    moments: Array1<f64>,
    /// tails[k][ℓ] = ∫_{x_k}^∞ φ_ℓ.
    tails: Array2<f64>,
}

impl Direction {
    fn new(basis: ScaledBasis) -> Result<Self> {
        let size = basis.size();
        let nodes = basis.nodes()?;
        let d = Array2::from_shape_vec((size, size), Expansion::differentiation_matrix(&basis)?)
            .map_err(|e| SpectralError::InvalidParameter(e.to_string()))?;
        let mut tails = Array2::zeros((size, size));
        for (k, &x) in nodes.iter().enumerate() {
            tails
                .row_mut(k)
                .assign(&Array1::from(tail_integrals(&basis, x)?));
        }
        Ok(Self {
            basis,
            d,
            integrals: Array1::from(tail_integrals(&basis, basis.x_l)?),
            moments: Array1::from(tail_moments(&basis, basis.x_l, 1)?),
            tails,
            nodes,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    pub t: f64,
    pub error: Option<f64>,
    pub beta_x: f64,
    pub beta_a: f64,
    pub freq_x: Option<f64>,
    pub freq_a: Option<f64>,
    pub mean_size: f64,
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct CellRun {
    pub history: Vec<CellRecord>,
    /// Nodal values n[a_i, x_j] at the final time.
    pub density: Array2<f64>,
    pub rescales_x: usize,
    pub rescales_a: usize,
    pub negative_warnings: usize,
}

impl CellRun {
    pub fn last(&self) -> &CellRecord {
        self.history
            .last()
            .expect("history holds the initial record")
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "t",
            "error",
            "beta",
            "freq",
            "ext",
            "xL",
            "beta_a",
            "freq_a",
            "mean_size",
        ]);
        for r in &self.history {
            t.push(vec![
                Some(r.t),
                r.error,
                Some(r.beta_x),
                r.freq_x,
                None,
                Some(0.0),
                Some(r.beta_a),
                r.freq_a,
                Some(r.mean_size),
            ]);
        }
        t
    }
}

pub struct CellModel {
    cfg: CellModelConfig,
    a: Direction,
    x: Direction,
}

impl CellModel {
    pub fn new(cfg: CellModelConfig) -> Result<Self> {
        if cfg.n < 2 {
            return Err(SpectralError::InvalidParameter(
                "cell model needs N ≥ 2".into(),
            ));
        }
        let a =
            Direction::new(ScaledBasis::laguerre_function(0.0, cfg.beta_a, 0.0, cfg.n)?.radau()?)?;
        let x =
            Direction::new(ScaledBasis::laguerre_function(0.0, cfg.beta_x, 0.0, cfg.n)?.radau()?)?;
        Ok(Self { cfg, a, x })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.a.nodes, &self.x.nodes)
    }

    pub fn sample(&self, f: Field, t: f64) -> Array2<f64> {
        Array2::from_shape_fn((self.a.nodes.len(), self.x.nodes.len()), |(i, j)| {
            f(self.a.nodes[i], self.x.nodes[j], t)
        })
    }

    pub fn expansion(&self, n: &Array2<f64>) -> Result<Expansion2D> {
        Expansion2D::interpolate(n, self.a.basis, self.x.basis)
    }

    /// Right-hand side of the semi-discrete system at interior nodes.
    pub fn rhs(&self, n: &Array2<f64>, t: f64) -> Array2<f64> {
        let (an, xn) = (&self.a.nodes, &self.x.nodes);
        let field = |f: Field| Array2::from_shape_fn(n.raw_dim(), |(i, j)| f(an[i], xn[j], t));
        let dxt = self.x.d.t();
        let n_a = self.a.d.dot(n);
        let gn = field(self.cfg.growth) * n;
        let flux = gn.dot(&dxt);
        let sn = field(self.cfg.sigma) * n;
        let diffusion = sn.dot(&dxt).dot(&dxt);
        -n_a - flux + 0.5 * diffusion - field(self.cfg.death) * n
    }

    /// Birth row n(0, x_k, t).
    fn birth(&self, n: &Array2<f64>, t: f64) -> Result<Array1<f64>> {
        let size = self.x.nodes.len();
        if self.cfg.division_depends_on_t_only {
            let c = self.expansion(n)?.coeffs;
            let k = (self.cfg.division)(0.0, 0.0, 0.0, t);
            // 2 k Σ_ℓm I^a_ℓ c_ℓm tails[k][m]
            let row = self.a.integrals.dot(&c);
            return Ok(self.x.tails.dot(&row) * (2.0 * k));
        }
        let (an, xn) = (&self.a.nodes, &self.x.nodes);
        let mut out = Array1::zeros(size);
        for (k, &xk) in xn.iter().enumerate() {
            let h = Array2::from_shape_fn(n.raw_dim(), |(i, j)| {
                (self.cfg.division)(an[i], xn[j], xk, t) * n[[i, j]]
            });
            let c = self.expansion(&h)?.coeffs;
            out[k] = 2.0 * self.a.integrals.dot(&c).dot(&self.x.tails.row(k));
        }
        Ok(out)
    }

    fn apply_boundary(&self, n: &mut Array2<f64>, t: f64) -> Result<()> {
        let birth = self.birth(n, t)?;
        n.row_mut(0).assign(&birth);
        for (i, &a) in self.a.nodes.iter().enumerate() {
            n[[i, 0]] = (self.cfg.boundary)(a, 0.0, t);
        }
        Ok(())
    }

    /// TVD-RK3 step from t to t + dt.
    pub fn step(&self, n: &Array2<f64>, t: f64, dt: f64) -> Result<Array2<f64>> {
        let mut u1 = n + &(self.rhs(n, t) * dt);
        self.apply_boundary(&mut u1, t + dt)?;
        let mut u2 = n * 0.75 + (&u1 + &(self.rhs(&u1, t + dt) * dt)) * 0.25;
        self.apply_boundary(&mut u2, t + 0.5 * dt)?;
        let mut u3 = n / 3.0 + (&u2 + &(self.rhs(&u2, t + 0.5 * dt) * dt)) * (2.0 / 3.0);
        self.apply_boundary(&mut u3, t + dt)?;
        Ok(u3)
    }

    /// ⟨x⟩ = ∫∫ x n / ∫∫ n, exact for the expansion.
    pub fn moments(&self, n: &Array2<f64>) -> Result<(f64, f64)> {
        let c = self.expansion(n)?.coeffs;
        let row = self.a.integrals.dot(&c);
        let mass = row.dot(&self.x.integrals);
        Ok((mass, row.dot(&self.x.moments) / mass))
    }

    fn record(&self, n: &Array2<f64>, t: f64) -> Result<CellRecord> {
        let e = self.expansion(n)?;
        let error = match self.cfg.exact {
            Some(f) => Some(e.relative_error(|a, x| f(a, x, t))?),
            None => None,
        };
        let (mass, mean_size) = self.moments(n)?;
        let ind = &self.cfg.adapt.indicators;
        Ok(CellRecord {
            t,
            error,
            beta_x: self.x.basis.beta,
            beta_a: self.a.basis.beta,
            freq_x: frequency_indicator_y(&e, ind),
            freq_a: frequency_indicator_x(&e, ind),
            mean_size,
            mass,
        })
    }

    /// Frequency-indicator scaling along one axis (0 = age, 1 = size).
    /// Returns the number of accepted rescales.
    fn scale(&mut self, n: &mut Array2<f64>, axis: Axis, f0: &mut Option<f64>) -> Result<usize> {
        let cfg = self.cfg.adapt;
        let ind = &cfg.indicators;
        let freq = |e: &Expansion2D| match axis.index() {
            0 => frequency_indicator_x(e, ind),
            _ => frequency_indicator_y(e, ind),
        };
        let mut e = self.expansion(n)?;
        let Some(mut f) = freq(&e) else { return Ok(0) };
        let Some(reference) = *f0 else {
            *f0 = Some(f);
            return Ok(0);
        };
        if f <= cfg.nu * reference {
            return Ok(0);
        }
        let mut count = 0;
        loop {
            let beta = if axis.index() == 0 {
                e.basis_x.beta
            } else {
                e.basis_y.beta
            } * cfg.q;
            if beta < cfg.beta_min {
                break;
            }
            let trial = if axis.index() == 0 {
                e.rescale_x(beta)?
            } else {
                e.rescale_y(beta)?
            };
            let Some(f_t) = freq(&trial) else { break };
            if f_t > f {
                break;
            }
            e = trial;
            *f0 = Some(f_t);
            f = f_t;
            count += 1;
        }
        if count > 0 {
            if axis.index() == 0 {
                self.a = Direction::new(e.basis_x)?;
            } else {
                self.x = Direction::new(e.basis_y)?;
            }
            *n = e.node_values()?;
        }
        Ok(count)
    }
}

pub fn solve_cell_model(cfg: &CellModelConfig) -> Result<CellRun> {
    cfg.adapt.validate()?;
    let steps = step_count(cfg.dt, cfg.t_end)?;
    let mut model = CellModel::new(*cfg)?;
    let mut n = model.sample(cfg.boundary, 0.0);
    let first = model.record(&n, 0.0)?;
    let ind = &cfg.adapt.indicators;
    let e = model.expansion(&n)?;
    let (mut fx0, mut fa0) = (
        frequency_indicator_y(&e, ind),
        frequency_indicator_x(&e, ind),
    );
    let mut run = CellRun {
        history: vec![first],
        density: n.clone(),
        rescales_x: 0,
        rescales_a: 0,
        negative_warnings: 0,
    };
    for k in 1..=steps {
        let t0 = (k - 1) as f64 * cfg.dt;
        let t = k as f64 * cfg.dt;
        n = model.step(&n, t0, cfg.dt)?;
        if n.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::Aborted {
                t: t0,
                reason: "non-finite density".into(),
            });
        }
        if n.iter().any(|&v| v < 0.0) {
            run.negative_warnings += 1;
        }
        if cfg.scale_x {
            run.rescales_x += model.scale(&mut n, Axis(1), &mut fx0)?;
        }
        if cfg.scale_a {
            run.rescales_a += model.scale(&mut n, Axis(0), &mut fa0)?;
        }
        run.history.push(model.record(&n, t)?);
    }
    run.density = n;
    Ok(run)
}
