//! Adaptive controllers over a pluggable time step: frequency-dependent
//! scaling, exterior-error-dependent moving, and moving followed by scaling.

mod table;
mod two_dim;

pub use table::Table;
pub use two_dim::{run_2d, AdaptState2D, Evolver2D, Record2D, Resample2D};

use crate::approx::Expansion;
use crate::error::{Result, SpectralError};
use crate::indicators::{exterior_error_indicator, frequency_indicator, IndicatorConfig};

#[derive(Debug, Clone, Copy)]
pub struct AdaptConfig {
    /// Frequency threshold multiplier ν > 1.
    pub nu: f64,
    /// Scaling ratio q ∈ (0, 1).
    pub q: f64,
    /// Lower bound for β.
    pub beta_min: f64,
    /// Exterior threshold multiplier μ > 1.
    pub mu: f64,
    /// Displacement quantum δ.
    pub delta: f64,
    /// Largest displacement per step.
    pub d_max: f64,
    /// After a move keep e0 = min(e0, E(moved)) instead of resetting it to
    /// E(moved). Suits rigid translation; a spreading front needs the reset.
    pub anchor_e0: bool,
    /// Recompute e0 whenever a rescale shifts x_R. Off, e0 changes only at
    /// a move.
    pub refresh_e0: bool,
    pub indicators: IndicatorConfig,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            nu: 1.0 / 0.95,
            q: 0.95,
            beta_min: 1e-2,
            mu: 1.005,
            delta: 0.004,
            d_max: 0.04,
            anchor_e0: true,
            refresh_e0: false,
            indicators: IndicatorConfig::default(),
        }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(SpectralError::InvalidParameter(what.to_string()));
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad("q must lie in (0, 1)");
        }
        if !(self.nu > 1.0) {
            return bad("nu must exceed 1");
        }
        if !(self.beta_min > 0.0) {
            return bad("beta_min must be positive");
        }
        if !(self.mu > 1.0) {
            return bad("mu must exceed 1");
        }
        if !(self.delta > 0.0 && self.d_max >= self.delta) {
            return bad("need 0 < delta <= d_max");
        }
        Ok(())
    }

    fn max_steps(&self) -> usize {
        ((self.d_max / self.delta) + 1e-9).floor().max(1.0) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    None,
    ScaleOnly,
    MoveOnly,
    MoveScale,
}

impl Mode {
    pub fn scales(self) -> bool {
        matches!(self, Mode::ScaleOnly | Mode::MoveScale)
    }

    pub fn moves(self) -> bool {
        matches!(self, Mode::MoveOnly | Mode::MoveScale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    pub t: f64,
    pub error: Option<f64>,
    pub beta: f64,
    pub freq: Option<f64>,
    pub ext: Option<f64>,
    pub x_l: f64,
}

#[derive(Debug, Clone)]
pub struct AdaptState {
    pub expansion: Expansion,
    pub f0: Option<f64>,
    pub e0: Option<f64>,
    pub x_r: f64,
    pub t: f64,
    pub history: Vec<ExperimentRecord>,
    pub moves: usize,
    pub rescales: usize,
}

impl AdaptState {
    pub fn new(expansion: Expansion, cfg: &AdaptConfig) -> Result<Self> {
        let f0 = frequency_indicator(&expansion, &cfg.indicators);
        let (x_r, e0) = if expansion.basis.family.is_half_line() {
            let x_r = cfg.indicators.x_r(&expansion.basis)?;
            (x_r, exterior_error_indicator(&expansion, x_r)?)
        } else {
            (f64::NAN, None)
        };
        Ok(Self {
            expansion,
            f0,
            e0,
            x_r,
            t: 0.0,
            history: Vec::new(),
            moves: 0,
            rescales: 0,
        })
    }

    /// Row describing the current state, with an optional exact solution at `t`.
    pub fn record<R: Fn(f64, f64) -> f64>(
        &self,
        cfg: &AdaptConfig,
        reference: Option<&R>,
    ) -> Result<ExperimentRecord> {
        let u = &self.expansion;
        let error = match reference {
            Some(r) => Some(u.relative_error(|x| r(x, self.t))?),
            None => None,
        };
        let ext = if u.basis.family.is_half_line() {
            exterior_error_indicator(u, cfg.indicators.x_r(&u.basis)?)?
        } else {
            None
        };
        Ok(ExperimentRecord {
            t: self.t,
            error,
            beta: u.basis.beta,
            freq: frequency_indicator(u, &cfg.indicators),
            ext,
            x_l: u.basis.x_l,
        })
    }
}

/// One time step U(t) → U(t+Δt) on an unchanged basis.
pub trait Evolver {
    fn step(&mut self, u: &Expansion, t: f64, dt: f64) -> Result<Expansion>;
}

/// Tracks a known function by re-interpolating it at each new time.
pub struct Resample<F: Fn(f64, f64) -> f64>(pub F);

impl<F: Fn(f64, f64) -> f64> Evolver for Resample<F> {
    fn step(&mut self, u: &Expansion, t: f64, dt: f64) -> Result<Expansion> {
        let t1 = t + dt;
        Expansion::from_fn(u.basis, |x| (self.0)(x, t1))
    }
}

/// Frequency-dependent scaling after an evolution step.
pub fn scaling_step(state: &mut AdaptState, cfg: &AdaptConfig) -> Result<()> {
    let ind = &cfg.indicators;
    let Some(mut f) = frequency_indicator(&state.expansion, ind) else {
        return Ok(());
    };
    let Some(f0) = state.f0 else {
        state.f0 = Some(f);
        return Ok(());
    };
    if f <= cfg.nu * f0 {
        return Ok(());
    }
    let mut beta_t = cfg.q * state.expansion.basis.beta;
    while beta_t >= cfg.beta_min {
        let trial = state.expansion.rescale(beta_t)?;
        let Some(f_t) = frequency_indicator(&trial, ind) else {
            break;
        };
        if f_t > f {
            break;
        }
        debug_assert!(f_t <= f);
        state.expansion = trial;
        state.f0 = Some(f_t);
        f = f_t;
        state.rescales += 1;
        beta_t *= cfg.q;
    }
    Ok(())
}

/// Exterior-error-dependent moving after an evolution step.
pub fn moving_step(state: &mut AdaptState, cfg: &AdaptConfig) -> Result<()> {
    let u = &state.expansion;
    let Some(e) = exterior_error_indicator(u, state.x_r)? else {
        return Ok(());
    };
    let Some(e0) = state.e0 else {
        state.e0 = Some(e);
        return Ok(());
    };
    let threshold = cfg.mu * e0;
    if e <= threshold {
        return Ok(());
    }
    let n_max = cfg.max_steps();
    let mut n = 1;
    while n < n_max {
        match exterior_error_indicator(u, state.x_r + n as f64 * cfg.delta)? {
            Some(v) if v >= threshold => n += 1,
            _ => break,
        }
    }
    let d0 = (n as f64 * cfg.delta).min(cfg.d_max);
    state.expansion = u.move_by(d0)?;
    state.x_r = cfg.indicators.x_r(&state.expansion.basis)?;
    state.moves += 1;
    // the reference only ever tightens: for exponentially decaying tails
    // the moved indicator overshoots and a plain reset would ratchet it up
    if let Some(moved) = exterior_error_indicator(&state.expansion, state.x_r)? {
        state.e0 = Some(if cfg.anchor_e0 { moved.min(e0) } else { moved });
    }
    Ok(())
}

/// Re-derive x_R from the current nodes; e0 follows if `refresh_e0` is set.
pub fn refresh_x_r(state: &mut AdaptState, cfg: &AdaptConfig) -> Result<()> {
    let x_r = cfg.indicators.x_r(&state.expansion.basis)?;
    if x_r != state.x_r {
        state.x_r = x_r;
        if cfg.refresh_e0 {
            state.e0 = exterior_error_indicator(&state.expansion, x_r)?;
        }
    }
    Ok(())
}

/// One full step of the given mode; the evolver runs exactly once.
pub fn adaptive_step<E: Evolver + ?Sized>(
    state: &mut AdaptState,
    evolver: &mut E,
    cfg: &AdaptConfig,
    dt: f64,
    t_next: f64,
    mode: Mode,
) -> Result<()> {
    if mode == Mode::MoveScale {
        refresh_x_r(state, cfg)?;
    }
    state.expansion =
        evolver
            .step(&state.expansion, state.t, dt)
            .map_err(|e| SpectralError::Aborted {
                t: state.t,
                reason: e.to_string(),
            })?;
    if let Some(k) = state.expansion.coeffs.iter().position(|c| !c.is_finite()) {
        return Err(SpectralError::Aborted {
            t: state.t,
            reason: format!("coefficient {k} not finite"),
        });
    }
    state.t = t_next;
    if mode.moves() {
        moving_step(state, cfg)?;
    }
    if mode.scales() {
        scaling_step(state, cfg)?;
    }
    Ok(())
}

/// Move-then-scale step (the combined controller).
pub fn move_scale_step<E: Evolver + ?Sized>(
    state: &mut AdaptState,
    evolver: &mut E,
    cfg: &AdaptConfig,
    dt: f64,
) -> Result<()> {
    let t_next = state.t + dt;
    adaptive_step(state, evolver, cfg, dt, t_next, Mode::MoveScale)
}

pub(crate) fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(SpectralError::InvalidParameter(
            "need dt > 0 and T > 0".into(),
        ));
    }
    Ok((t_end / dt + 1e-9).floor() as usize)
}

/// Time loop: one record at t = 0 and one after each step.
pub fn run<E, R>(
    evolver: &mut E,
    initial: Expansion,
    cfg: &AdaptConfig,
    dt: f64,
    t_end: f64,
    mode: Mode,
    reference: Option<&R>,
) -> Result<AdaptState>
where
    E: Evolver + ?Sized,
    R: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    let steps = step_count(dt, t_end)?;
    let mut state = AdaptState::new(initial, cfg)?;
    let first = state.record(cfg, reference)?;
    state.history.push(first);
    for k in 1..=steps {
        adaptive_step(&mut state, evolver, cfg, dt, k as f64 * dt, mode)?;
        let rec = state.record(cfg, reference)?;
        state.history.push(rec);
    }
    Ok(state)
}

/// Scan β over β_max·q^k, k = 0..steps, and return the one minimizing the
/// frequency indicator of the interpolant of `f`.
pub fn suggest_initial_beta<F: Fn(f64) -> f64>(
    basis: crate::basis::ScaledBasis,
    f: F,
    q: f64,
    steps: usize,
    cfg: &IndicatorConfig,
) -> Result<f64> {
    let mut best = (f64::INFINITY, basis.beta);
    let mut beta = basis.beta;
    for _ in 0..=steps {
        let e = Expansion::from_fn(basis.with_beta(beta), &f)?;
        if let Some(v) = frequency_indicator(&e, cfg) {
            if v < best.0 {
                best = (v, beta);
            }
        }
        beta *= q;
    }
    Ok(best.1)
}

pub fn history_table(history: &[ExperimentRecord]) -> Table {
    let mut t = Table::new(&["t", "error", "beta", "freq", "ext", "xL"]);
    for r in history {
        t.push(vec![
            Some(r.t),
            r.error,
            Some(r.beta),
            r.freq,
            r.ext,
            Some(r.x_l),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ScaledBasis;

    #[test]
    fn config_validation() {
        assert!(AdaptConfig::default().validate().is_ok());
        assert!(AdaptConfig {
            q: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(AdaptConfig {
            d_max: 0.001,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert_eq!(
            AdaptConfig {
                delta: 0.008,
                d_max: 0.08,
                ..Default::default()
            }
            .max_steps(),
            10
        );
    }

    #[test]
    fn short_horizon_has_only_initial_record() {
        let b = ScaledBasis::laguerre_function(0.0, 1.0, 0.0, 10).unwrap();
        let u = |x: f64, _t: f64| (-x).exp();
        let e = Expansion::from_fn(b, |x| u(x, 0.0)).unwrap();
        let s = run(
            &mut Resample(u),
            e,
            &AdaptConfig::default(),
            0.1,
            0.05,
            Mode::MoveScale,
            Some(&u),
        )
        .unwrap();
        assert_eq!(s.history.len(), 1);
    }

    #[test]
    fn quiet_state_is_left_alone() {
        let b = ScaledBasis::laguerre_function(0.0, 1.0, 0.0, 12).unwrap();
        let e = Expansion::from_fn(b, |x| (-x).exp()).unwrap();
        let cfg = AdaptConfig::default();
        let mut s = AdaptState::new(e.clone(), &cfg).unwrap();
        scaling_step(&mut s, &cfg).unwrap();
        moving_step(&mut s, &cfg).unwrap();
        assert_eq!(s.expansion, e);
        assert_eq!((s.moves, s.rescales), (0, 0));
    }
}
