//! Dimension-by-dimension controller for tensor-product expansions.

use super::{step_count, AdaptConfig, Mode, Table};
use crate::approx::Expansion2D;
use crate::error::{Result, SpectralError};
use crate::indicators::{
    exterior_error_indicator, frequency_indicator_x, frequency_indicator_y, IndicatorConfig,
};

pub trait Evolver2D {
    fn step(&mut self, u: &Expansion2D, t: f64, dt: f64) -> Result<Expansion2D>;
}

pub struct Resample2D<F: Fn(f64, f64, f64) -> f64>(pub F);

impl<F: Fn(f64, f64, f64) -> f64> Evolver2D for Resample2D<F> {
    fn step(&mut self, u: &Expansion2D, t: f64, dt: f64) -> Result<Expansion2D> {
        let t1 = t + dt;
        Expansion2D::from_fn(u.basis_x, u.basis_y, |x, y| (self.0)(x, y, t1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record2D {
    pub t: f64,
    pub error: Option<f64>,
    pub beta_x: f64,
    pub beta_y: f64,
    pub freq_x: Option<f64>,
    pub freq_y: Option<f64>,
    pub ext_x: Option<f64>,
    pub ext_y: Option<f64>,
    pub x_l: f64,
    pub y_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    X,
    Y,
}

#[derive(Debug, Clone)]
pub struct AdaptState2D {
    pub expansion: Expansion2D,
    pub f0: [Option<f64>; 2],
    pub e0: [Option<f64>; 2],
    pub x_r: [f64; 2],
    pub t: f64,
    pub history: Vec<Record2D>,
    pub moves: [usize; 2],
    pub rescales: [usize; 2],
}

fn freq(u: &Expansion2D, d: Dir, cfg: &IndicatorConfig) -> Option<f64> {
    match d {
        Dir::X => frequency_indicator_x(u, cfg),
        Dir::Y => frequency_indicator_y(u, cfg),
    }
}

/// Marginals are computed once per decision and reused for all probes.
fn marginal(u: &Expansion2D, d: Dir) -> Result<crate::approx::Expansion> {
    match d {
        Dir::X => u.marginal_x(),
        Dir::Y => u.marginal_y(),
    }
}

fn sentinel(u: &Expansion2D, d: Dir, cfg: &IndicatorConfig) -> Result<f64> {
    match d {
        Dir::X => cfg.x_r(&u.basis_x),
        Dir::Y => cfg.x_r(&u.basis_y),
    }
}

impl AdaptState2D {
    pub fn new(expansion: Expansion2D, cfg: &AdaptConfig) -> Result<Self> {
        let ind = &cfg.indicators;
        let mut s = Self {
            f0: [freq(&expansion, Dir::X, ind), freq(&expansion, Dir::Y, ind)],
            e0: [None, None],
            x_r: [0.0, 0.0],
            expansion,
            t: 0.0,
            history: Vec::new(),
            moves: [0, 0],
            rescales: [0, 0],
        };
        for (k, d) in [Dir::X, Dir::Y].into_iter().enumerate() {
            s.x_r[k] = sentinel(&s.expansion, d, ind)?;
            s.e0[k] = exterior_error_indicator(&marginal(&s.expansion, d)?, s.x_r[k])?;
        }
        Ok(s)
    }

    pub fn record<R: Fn(f64, f64, f64) -> f64>(
        &self,
        cfg: &AdaptConfig,
        reference: Option<&R>,
    ) -> Result<Record2D> {
        let u = &self.expansion;
        let ind = &cfg.indicators;
        let error = match reference {
            Some(r) => Some(u.relative_error(|x, y| r(x, y, self.t))?),
            None => None,
        };
        let ext = |d: Dir| -> Result<Option<f64>> {
            exterior_error_indicator(&marginal(u, d)?, sentinel(u, d, ind)?)
        };
        Ok(Record2D {
            t: self.t,
            error,
            beta_x: u.basis_x.beta,
            beta_y: u.basis_y.beta,
            freq_x: freq(u, Dir::X, ind),
            freq_y: freq(u, Dir::Y, ind),
            ext_x: ext(Dir::X)?,
            ext_y: ext(Dir::Y)?,
            x_l: u.basis_x.x_l,
            y_l: u.basis_y.x_l,
        })
    }

    fn refresh(&mut self, cfg: &AdaptConfig) -> Result<()> {
        for (k, d) in [Dir::X, Dir::Y].into_iter().enumerate() {
            let x_r = sentinel(&self.expansion, d, &cfg.indicators)?;
            if x_r != self.x_r[k] {
                self.x_r[k] = x_r;
                if cfg.refresh_e0 {
                    self.e0[k] = exterior_error_indicator(&marginal(&self.expansion, d)?, x_r)?;
                }
            }
        }
        Ok(())
    }

    /// Both displacements are decided on the same unmoved expansion.
    fn moving(&mut self, cfg: &AdaptConfig) -> Result<()> {
        let mut shift = [0.0, 0.0];
        for (k, d) in [Dir::X, Dir::Y].into_iter().enumerate() {
            let m = marginal(&self.expansion, d)?;
            let Some(e) = exterior_error_indicator(&m, self.x_r[k])? else {
                continue;
            };
            let Some(e0) = self.e0[k] else {
                self.e0[k] = Some(e);
                continue;
            };
            let threshold = cfg.mu * e0;
            if e <= threshold {
                continue;
            }
            let n_max = cfg.max_steps();
            let mut n = 1;
            while n < n_max {
                match exterior_error_indicator(&m, self.x_r[k] + n as f64 * cfg.delta)? {
                    Some(v) if v >= threshold => n += 1,
                    _ => break,
                }
            }
            shift[k] = (n as f64 * cfg.delta).min(cfg.d_max);
        }
        if shift[0] > 0.0 {
            self.expansion = self.expansion.move_x(shift[0])?;
        }
        if shift[1] > 0.0 {
            self.expansion = self.expansion.move_y(shift[1])?;
        }
        for (k, d) in [Dir::X, Dir::Y].into_iter().enumerate() {
            if shift[k] == 0.0 {
                continue;
            }
            self.moves[k] += 1;
            self.x_r[k] = sentinel(&self.expansion, d, &cfg.indicators)?;
            let moved = exterior_error_indicator(&marginal(&self.expansion, d)?, self.x_r[k])?;
            if let (Some(m), Some(e0)) = (moved, self.e0[k]) {
                self.e0[k] = Some(if cfg.anchor_e0 { m.min(e0) } else { m });
            }
        }
        Ok(())
    }

    fn scaling(&mut self, cfg: &AdaptConfig) -> Result<()> {
        let ind = &cfg.indicators;
        for (k, d) in [Dir::X, Dir::Y].into_iter().enumerate() {
            let Some(mut f) = freq(&self.expansion, d, ind) else {
                continue;
            };
            let Some(f0) = self.f0[k] else {
                self.f0[k] = Some(f);
                continue;
            };
            if f <= cfg.nu * f0 {
                continue;
            }
            let beta = match d {
                Dir::X => self.expansion.basis_x.beta,
                Dir::Y => self.expansion.basis_y.beta,
            };
            let mut beta_t = cfg.q * beta;
            while beta_t >= cfg.beta_min {
                let trial = match d {
                    Dir::X => self.expansion.rescale_x(beta_t)?,
                    Dir::Y => self.expansion.rescale_y(beta_t)?,
                };
                let Some(f_t) = freq(&trial, d, ind) else {
                    break;
                };
                if f_t > f {
                    break;
                }
                self.expansion = trial;
                self.f0[k] = Some(f_t);
                f = f_t;
                self.rescales[k] += 1;
                beta_t *= cfg.q;
            }
        }
        Ok(())
    }
}

pub fn run_2d<E, R>(
    evolver: &mut E,
    initial: Expansion2D,
    cfg: &AdaptConfig,
    dt: f64,
    t_end: f64,
    mode: Mode,
    reference: Option<&R>,
) -> Result<AdaptState2D>
where
    E: Evolver2D + ?Sized,
    R: Fn(f64, f64, f64) -> f64,
{
    cfg.validate()?;
    let steps = step_count(dt, t_end)?;
    let mut s = AdaptState2D::new(initial, cfg)?;
    let first = s.record(cfg, reference)?;
    s.history.push(first);
    for k in 1..=steps {
        if mode == Mode::MoveScale {
            s.refresh(cfg)?;
        }
        s.expansion = evolver
            .step(&s.expansion, s.t, dt)
            .map_err(|e| SpectralError::Aborted {
                t: s.t,
                reason: e.to_string(),
            })?;
        s.t = k as f64 * dt;
        if mode.moves() {
            s.moving(cfg)?;
        }
        if mode.scales() {
            s.scaling(cfg)?;
        }
        let rec = s.record(cfg, reference)?;
        s.history.push(rec);
    }
    Ok(s)
}

impl Record2D {
    pub fn table(history: &[Record2D]) -> Table {
        let mut t = Table::new(&[
            "t", "error", "beta_x", "beta_y", "freq_x", "freq_y", "ext_x", "ext_y", "xL", "yL",
        ]);
        for r in history {
            t.push(vec![
                Some(r.t),
                r.error,
                Some(r.beta_x),
                Some(r.beta_y),
                r.freq_x,
                r.freq_y,
                r.ext_x,
                r.ext_y,
                Some(r.x_l),
                Some(r.y_l),
            ]);
        }
        t
    }
}
