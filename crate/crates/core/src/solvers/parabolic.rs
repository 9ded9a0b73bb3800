//! Hermite-Galerkin solver for u_t − u_xx = 0 on the line with a
//! Crank-Nicolson step and a choice of scaling strategy.

use crate::adapt::{scaling_step, step_count, AdaptConfig, AdaptState, Table};
use crate::approx::Expansion;
use crate::basis::{derivative_coeffs, RuleKind, ScaledBasis};
use crate::error::{Result, SpectralError};
use crate::indicators::frequency_indicator;

#[derive(Debug, Clone, Copy)]
pub enum ScalingStrategy {
    Fixed(f64),
    /// β(t) = 1/(2√(δ₀(δt+1))).
    TimeDependent {
        delta0: f64,
        delta: f64,
    },
    /// Frequency-indicator driven scaling starting from `beta0`.
    FrequencyDependent {
        beta0: f64,
        adapt: AdaptConfig,
    },
}

impl ScalingStrategy {
    pub fn time_dependent_beta(delta0: f64, delta: f64, t: f64) -> f64 {
        1.0 / (2.0 * (delta0 * (delta * t + 1.0)).sqrt())
    }

    fn initial_beta(&self) -> f64 {
        match *self {
            Self::Fixed(b) => b,
            Self::TimeDependent { delta0, delta } => Self::time_dependent_beta(delta0, delta, 0.0),
            Self::FrequencyDependent { beta0, .. } => beta0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::Fixed(b) => *b > 0.0,
            Self::TimeDependent { delta0, delta } => *delta0 > 0.0 && *delta > 0.0,
            Self::FrequencyDependent { beta0, adapt } => *beta0 > 0.0 && adapt.validate().is_ok(),
        };
        if ok {
            Ok(())
        } else {
            Err(SpectralError::InvalidParameter(format!(
                "scaling strategy {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParabolicConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub strategy: ScalingStrategy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicRecord {
    pub t: f64,
    pub beta: f64,
    pub freq: Option<f64>,
    pub e_n: f64,
    pub e_inf: f64,
}

#[derive(Debug, Clone)]
pub struct ParabolicRun {
    pub history: Vec<ParabolicRecord>,
    pub solution: Expansion,
    pub rescales: usize,
}

impl ParabolicRun {
    pub fn last(&self) -> &ParabolicRecord {
        self.history
            .last()
            .expect("history holds the initial record")
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["t", "error", "beta", "freq", "ext", "xL", "E_N", "E_N_inf"]);
        for r in &self.history {
            t.push(vec![
                Some(r.t),
                Some(r.e_n),
                Some(r.beta),
                r.freq,
                None,
                Some(0.0),
                Some(r.e_n),
                Some(r.e_inf),
            ]);
        }
        t
    }
}

/// Heat-kernel solution (1+t)^{−1/2} e^{−x²/(4(1+t))}.
pub fn heat_solution(x: f64, t: f64) -> f64 {
    super::references::heat_kernel(x, t)
}

/// S with S_ℓm = (∂_x φ_ℓ, ∂_x φ_m), built as (βD)ᵀ(βD) from the Hermite
/// derivative operator; dense row-major, (N+1)².
pub fn assemble_stiffness(n: usize, beta: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(SpectralError::InvalidParameter(
            "stiffness needs N ≥ 2".into(),
        ));
    }
    let basis = ScaledBasis::hermite(beta, n)?;
    let size = n + 1;
    // columns of the derivative operator, each of length N+2
    let mut cols = Vec::with_capacity(size);
    for l in 0..size {
        let mut e = vec![0.0; size];
        e[l] = 1.0;
        cols.push(derivative_coeffs(&e, &basis)?.0);
    }
    let mut s = vec![0.0; size * size];
    for i in 0..size {
        for j in 0..size {
            s[i * size + j] = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
        }
    }
    Ok(s)
}

/// Thomas algorithm for a tridiagonal system (sub, diag, sup).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    if d == 0.0 {
        return Err(SpectralError::NonFinite(
            "singular Crank-Nicolson system".into(),
        ));
    }
    rhs[0] /= d;
    for i in 1..n {
        c[i - 1] = sup[i - 1] / d;
        d = diag[i] - sub[i - 1] * c[i - 1];
        if d == 0.0 {
            return Err(SpectralError::NonFinite(
                "singular Crank-Nicolson system".into(),
            ));
        }
        rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

/// Crank-Nicolson step for one β. S only couples ℓ with ℓ±2, so even and
/// odd modes form two independent tridiagonal systems.
pub struct CrankNicolson {
    beta: f64,
    dt: f64,
    size: usize,
    stiffness: Vec<f64>,
}

impl CrankNicolson {
    pub fn new(n: usize, beta: f64, dt: f64) -> Result<Self> {
        Ok(Self {
            beta,
            dt,
            size: n + 1,
            stiffness: assemble_stiffness(n, beta)?,
        })
    }

    fn s(&self, i: usize, j: usize) -> f64 {
        self.stiffness[i * self.size + j]
    }

    pub fn step(&self, c: &[f64]) -> Result<Vec<f64>> {
        let h = 0.5 * self.dt;
        let mut out = vec![0.0; self.size];
        for parity in 0..2 {
            let idx: Vec<usize> = (parity..self.size).step_by(2).collect();
            let m = idx.len();
            let diag: Vec<f64> = idx.iter().map(|&i| 1.0 + h * self.s(i, i)).collect();
            let off: Vec<f64> = idx.windows(2).map(|w| h * self.s(w[0], w[1])).collect();
            let mut rhs: Vec<f64> = (0..m)
                .map(|k| {
                    let i = idx[k];
                    let mut v = c[i] - h * self.s(i, i) * c[i];
                    if k > 0 {
                        v -= off[k - 1] * c[idx[k - 1]];
                    }
                    if k + 1 < m {
                        v -= off[k] * c[idx[k + 1]];
                    }
                    v
                })
                .collect();
            thomas(&off, &diag, &off, &mut rhs)?;
            for (k, &i) in idx.iter().enumerate() {
                out[i] = rhs[k];
            }
        }
        Ok(out)
    }
}

/// Relative discrete L² error and max nodal error at the current nodes.
pub fn parabolic_errors(u: &Expansion, t: f64) -> Result<(f64, f64)> {
    let q = u.basis.quadrature(RuleKind::Gauss)?;
    let vals = u.node_values()?;
    let (mut num, mut den, mut inf) = (0.0, 0.0, 0.0f64);
    for ((x, w), v) in q.nodes.iter().zip(&q.plain_weights).zip(&vals) {
        let r = heat_solution(*x, t);
        num += w * (v - r) * (v - r);
        den += w * r * r;
        inf = inf.max((v - r).abs());
    }
    Ok(((num / den).sqrt(), inf))
}

pub fn solve_parabolic(cfg: &ParabolicConfig) -> Result<ParabolicRun> {
    cfg.strategy.validate()?;
    let steps = step_count(cfg.dt, cfg.t_end)?;
    let basis = ScaledBasis::hermite(cfg.strategy.initial_beta(), cfg.n)?;
    let initial = Expansion::from_fn(basis, |x| heat_solution(x, 0.0))?;
    let adapt = match cfg.strategy {
        ScalingStrategy::FrequencyDependent { adapt, .. } => adapt,
        _ => AdaptConfig::default(),
    };
    let mut state = AdaptState::new(initial, &adapt)?;
    let mut cn = CrankNicolson::new(cfg.n, basis.beta, cfg.dt)?;
    let record = |u: &Expansion, t: f64| -> Result<ParabolicRecord> {
        let (e_n, e_inf) = parabolic_errors(u, t)?;
        Ok(ParabolicRecord {
            t,
            beta: u.basis.beta,
            freq: frequency_indicator(u, &adapt.indicators),
            e_n,
            e_inf,
        })
    };
    let mut history = vec![record(&state.expansion, 0.0)?];
    for k in 1..=steps {
        let t = k as f64 * cfg.dt;
        let beta = state.expansion.basis.beta;
        if cn.beta != beta {
            cn = CrankNicolson::new(cfg.n, beta, cfg.dt)?;
        }
        let c = cn.step(&state.expansion.coeffs)?;
        state.expansion =
            Expansion::new(state.expansion.basis, c).map_err(|e| SpectralError::Aborted {
                t: state.t,
                reason: e.to_string(),
            })?;
        state.t = t;
        match cfg.strategy {
            ScalingStrategy::Fixed(_) => {}
            ScalingStrategy::TimeDependent { delta0, delta } => {
                let b = ScalingStrategy::time_dependent_beta(delta0, delta, t);
                state.expansion = state.expansion.rescale(b)?;
                state.rescales += 1;
            }
            ScalingStrategy::FrequencyDependent { .. } => scaling_step(&mut state, &adapt)?,
        }
        history.push(record(&state.expansion, t)?);
    }
    Ok(ParabolicRun {
        history,
        solution: state.expansion,
        rescales: state.rescales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiffness_entries() {
        let s = assemble_stiffness(6, 1.0).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-14);
        assert!((s[2] + 2f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(s[1].abs() < 1e-15);
    }

    #[test]
    fn cn_step_matches_dense_solve() {
        let n = 7;
        let cn = CrankNicolson::new(n, 0.8, 0.1).unwrap();
        let c: Vec<f64> = (0..=n).map(|l| 1.0 / (1.0 + l as f64)).collect();
        let out = cn.step(&c).unwrap();
        // (I + h S) out = (I − h S) c
        for i in 0..=n {
            let lhs: f64 = out[i] + (0..=n).map(|j| 0.05 * cn.s(i, j) * out[j]).sum::<f64>();
            let rhs: f64 = c[i] - (0..=n).map(|j| 0.05 * cn.s(i, j) * c[j]).sum::<f64>();
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }
}
