//! Variable-speed transport u_t + (2 + (x−2t)/(2+t)) u_x = 0 on x > 0,
//! split into a finite-difference interior [0, x_L] and an adaptive
//! Laguerre exterior (x_L, ∞).

use crate::adapt::{
    moving_step, refresh_x_r, scaling_step, step_count, AdaptConfig, AdaptState, Evolver, Mode,
    Table,
};
use crate::approx::Expansion;
use crate::basis::{RuleKind, ScaledBasis};
use crate::error::{Result, SpectralError};
use crate::indicators::{exterior_error_indicator, frequency_indicator};

use super::chebyshev::{barycentric, cgl_nodes};
use super::references::{fermi, transport_exact};

pub fn speed(x: f64, t: f64) -> f64 {
    2.0 + (x - 2.0 * t) / (2.0 + t)
}

/// Inflow datum u(0, t).
pub fn inflow(t: f64) -> f64 {
    fermi(-2.0 * t / (2.0 + t))
}

#[derive(Debug, Clone, Copy)]
pub struct TransportConfig {
    pub n: usize,
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub mode: Mode,
    pub adapt: AdaptConfig,
    /// Interior points while x_L < d_max.
    pub startup_points: usize,
    /// Largest admissible CFL number of the interior scheme.
    pub cfl: f64,
    pub coupling: Coupling,
}

/// How the exterior sees the interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// Gauss collocation with no boundary value at x_L.
    #[default]
    Free,
    /// Gauss-Radau collocation with the interior's right-end value imposed
    /// at x_L.
    Inflow,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            n: 40,
            beta: 2.5,
            dt: 0.001,
            t_end: 5.0,
            mode: Mode::MoveScale,
            adapt: AdaptConfig {
                mu: 1.004,
                delta: 0.02,
                d_max: 0.2,
                anchor_e0: false,
                ..AdaptConfig::default()
            },
            startup_points: 10,
            cfl: 0.9,
            coupling: Coupling::Free,
        }
    }
}

/// Collocation with Heun's method on the exterior nodes. On Radau nodes
/// with `boundary` set, the node at x_L carries that value (new time level).
#[derive(Debug, Default)]
pub struct ExteriorHeun {
    cache: Option<(ScaledBasis, Vec<f64>)>,
    pub boundary: Option<f64>,
}

impl ExteriorHeun {
    fn matrix(&mut self, basis: &ScaledBasis) -> Result<&[f64]> {
        if self.cache.as_ref().map(|(b, _)| b != basis).unwrap_or(true) {
            self.cache = Some((*basis, Expansion::differentiation_matrix(basis)?));
        }
        Ok(&self.cache.as_ref().expect("just filled").1)
    }
}

impl Evolver for ExteriorHeun {
    fn step(&mut self, u: &Expansion, t: f64, dt: f64) -> Result<Expansion> {
        let nodes = u.basis.nodes()?;
        let size = nodes.len();
        let boundary = self.boundary;
        let d = self.matrix(&u.basis)?;
        let rate = |v: &[f64], t: f64| -> Vec<f64> {
            (0..size)
                .map(|j| {
                    let dv: f64 = d[j * size..(j + 1) * size]
                        .iter()
                        .zip(v)
                        .map(|(a, b)| a * b)
                        .sum();
                    -speed(nodes[j], t) * dv
                })
                .collect()
        };
        let pinned = match (u.basis.nodes_kind, boundary) {
            (RuleKind::GaussRadau, Some(g)) => Some(g),
            _ => None,
        };
        let v = u.node_values()?;
        let k1 = rate(&v, t);
        let mut pred: Vec<f64> = v.iter().zip(&k1).map(|(a, k)| a + dt * k).collect();
        if let Some(g) = pinned {
            pred[0] = g;
        }
        let k2 = rate(&pred, t + dt);
        let mut next: Vec<f64> = (0..size)
            .map(|j| v[j] + 0.5 * dt * (k1[j] + k2[j]))
            .collect();
        if let Some(g) = pinned {
            next[0] = g;
        }
        Expansion::interpolate(&next, u.basis)
    }
}

/// Upwind finite differences on [0, x_L].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Interior {
    pub mesh: Vec<f64>,
    pub values: Vec<f64>,
    pub uniform: bool,
}

impl Interior {
    pub fn right_end(&self) -> f64 {
        self.mesh.last().copied().unwrap_or(0.0)
    }

    fn rate(&self, v: &[f64], t: f64) -> Vec<f64> {
        let mut r = vec![0.0; v.len()];
        for j in 1..v.len() {
            r[j] = -speed(self.mesh[j], t) * (v[j] - v[j - 1]) / (self.mesh[j] - self.mesh[j - 1]);
        }
        r
    }

    /// Heun's method, sub-stepped so the CFL number stays below `cfl`.
    pub fn step(&mut self, t: f64, dt: f64, cfl: f64) {
        if self.mesh.len() < 2 {
            return;
        }
        let courant = (1..self.mesh.len())
            .map(|j| {
                speed(self.mesh[j], t + dt).max(speed(self.mesh[j], t)) * dt
                    / (self.mesh[j] - self.mesh[j - 1])
            })
            .fold(0.0, f64::max);
        let m = ((courant / cfl).ceil() as usize).max(1);
        let h = dt / m as f64;
        for s in 0..m {
            let t0 = t + s as f64 * h;
            let k1 = self.rate(&self.values, t0);
            let mut pred: Vec<f64> = self
                .values
                .iter()
                .zip(&k1)
                .map(|(a, k)| a + h * k)
                .collect();
            pred[0] = inflow(t0 + h);
            let k2 = self.rate(&pred, t0 + h);
            for j in 0..self.values.len() {
                self.values[j] += 0.5 * h * (k1[j] + k2[j]);
            }
            self.values[0] = inflow(t0 + h);
        }
    }

    fn value_at(&self, x: f64, t: f64) -> f64 {
        if self.mesh.len() < 2 || x <= 0.0 {
            return inflow(t);
        }
        if !self.uniform {
            return barycentric(&self.mesh, &self.values, x);
        }
        let k = self
            .mesh
            .partition_point(|&m| m < x)
            .clamp(1, self.mesh.len() - 1);
        let (x0, x1) = (self.mesh[k - 1], self.mesh[k]);
        let s = (x - x0) / (x1 - x0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }

    /// Grow to [0, x_l]; points beyond the old right end come from `outside`.
    pub fn extend<F: Fn(f64) -> f64>(
        &mut self,
        x_l: f64,
        t: f64,
        cfg: &TransportConfig,
        outside: F,
    ) {
        let old_end = self.right_end();
        if x_l <= old_end {
            return;
        }
        let fill = |x: f64| {
            if x <= old_end {
                self.value_at(x, t)
            } else {
                outside(x)
            }
        };
        if x_l < cfg.adapt.d_max {
            let mesh = cgl_nodes(cfg.startup_points - 1, 0.0, x_l);
            let mut values: Vec<f64> = mesh.iter().map(|&x| fill(x)).collect();
            values[0] = inflow(t);
            *self = Self {
                mesh,
                values,
                uniform: false,
            };
            return;
        }
        let cells = (x_l / cfg.adapt.delta).round().max(1.0) as usize;
        let h = x_l / cells as f64;
        let mesh: Vec<f64> = (0..=cells)
            .map(|j| if j == cells { x_l } else { j as f64 * h })
            .collect();
        let mut values: Vec<f64> = if self.uniform {
            // keep the evolved values on the shared part of the mesh
            mesh.iter()
                .enumerate()
                .map(|(j, &x)| {
                    if j < self.values.len() {
                        self.values[j]
                    } else {
                        outside(x)
                    }
                })
                .collect()
        } else {
            mesh.iter().map(|&x| fill(x)).collect()
        };
        values[0] = inflow(t);
        *self = Self {
            mesh,
            values,
            uniform: true,
        };
    }

    /// (∫ (v − u)², ∫ u²) by the trapezoid rule on the mesh.
    pub fn error_sums<F: Fn(f64) -> f64>(&self, reference: F) -> (f64, f64) {
        let (mut num, mut den) = (0.0, 0.0);
        for j in 1..self.mesh.len() {
            let h = self.mesh[j] - self.mesh[j - 1];
            let (r0, r1) = (reference(self.mesh[j - 1]), reference(self.mesh[j]));
            let (e0, e1) = (self.values[j - 1] - r0, self.values[j] - r1);
            num += 0.5 * h * (e0 * e0 + e1 * e1);
            den += 0.5 * h * (r0 * r0 + r1 * r1);
        }
        (num, den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportRecord {
    pub t: f64,
    pub exterior_error: f64,
    pub whole_error: f64,
    pub beta: f64,
    pub freq: Option<f64>,
    pub ext: Option<f64>,
    pub x_l: f64,
    pub interior_points: usize,
}

#[derive(Debug, Clone)]
pub struct TransportRun {
    pub history: Vec<TransportRecord>,
    pub exterior: Expansion,
    pub interior: Interior,
    pub moves: usize,
    pub rescales: usize,
}

impl TransportRun {
    pub fn last(&self) -> &TransportRecord {
        self.history
            .last()
            .expect("history holds the initial record")
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["t", "error", "beta", "freq", "ext", "xL", "whole_error"]);
        for r in &self.history {
            t.push(vec![
                Some(r.t),
                Some(r.exterior_error),
                Some(r.beta),
                r.freq,
                r.ext,
                Some(r.x_l),
                Some(r.whole_error),
            ]);
        }
        t
    }
}

fn record(
    state: &AdaptState,
    interior: &Interior,
    cfg: &TransportConfig,
) -> Result<TransportRecord> {
    let u = &state.expansion;
    let t = state.t;
    let exact = |x: f64| transport_exact(x, t);
    let (en, ed) = u.error_sums(exact)?;
    let (inum, iden) = interior.error_sums(exact);
    let ind = &cfg.adapt.indicators;
    Ok(TransportRecord {
        t,
        exterior_error: (en / ed).sqrt(),
        whole_error: ((en + inum) / (ed + iden)).sqrt(),
        beta: u.basis.beta,
        freq: frequency_indicator(u, ind),
        ext: exterior_error_indicator(u, ind.x_r(&u.basis)?)?,
        x_l: u.basis.x_l,
        interior_points: interior.mesh.len(),
    })
}

pub fn solve_transport(cfg: &TransportConfig) -> Result<TransportRun> {
    cfg.adapt.validate()?;
    if cfg.startup_points < 2 || !(cfg.cfl > 0.0) {
        return Err(SpectralError::InvalidParameter(
            "need ≥ 2 startup points and CFL > 0".into(),
        ));
    }
    let steps = step_count(cfg.dt, cfg.t_end)?;
    let mut basis = ScaledBasis::laguerre_function(0.0, cfg.beta, 0.0, cfg.n)?;
    if cfg.coupling == Coupling::Inflow {
        basis = basis.radau()?;
    }
    let initial = Expansion::from_fn(basis, |x| transport_exact(x, 0.0))?;
    let mut state = AdaptState::new(initial, &cfg.adapt)?;
    let mut interior = Interior::default();
    let mut evolver = ExteriorHeun::default();
    let mut history = vec![record(&state, &interior, cfg)?];
    for k in 1..=steps {
        let t0 = state.t;
        let t1 = k as f64 * cfg.dt;
        if cfg.mode == Mode::MoveScale {
            refresh_x_r(&mut state, &cfg.adapt)?;
        }
        interior.step(t0, cfg.dt, cfg.cfl);
        if interior.values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::Aborted {
                t: t0,
                reason: "interior blow-up".into(),
            });
        }
        if cfg.coupling == Coupling::Inflow {
            evolver.boundary = Some(
                interior
                    .values
                    .last()
                    .copied()
                    .unwrap_or_else(|| inflow(t1)),
            );
        }
        let unmoved =
            evolver
                .step(&state.expansion, t0, cfg.dt)
                .map_err(|e| SpectralError::Aborted {
                    t: t0,
                    reason: e.to_string(),
                })?;
        state.expansion = unmoved.clone();
        state.t = t1;
        if cfg.mode.moves() {
            moving_step(&mut state, &cfg.adapt)?;
        }
        if cfg.mode.scales() {
            scaling_step(&mut state, &cfg.adapt)?;
        }
        let x_l = state.expansion.basis.x_l;
        if x_l > interior.right_end() {
            interior.extend(x_l, t1, cfg, |x| unmoved.eval_unchecked(x));
        }
        history.push(record(&state, &interior, cfg)?);
    }
    Ok(TransportRun {
        history,
        exterior: state.expansion,
        interior,
        moves: state.moves,
        rescales: state.rescales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inflow_matches_exact_solution() {
        for t in [0.0, 0.7, 3.0] {
            assert!((inflow(t) - transport_exact(0.0, t)).abs() < 1e-15);
        }
        assert!(speed(0.0, 100.0) > 0.0);
    }

    #[test]
    fn mesh_switches_to_uniform_spacing() {
        let cfg = TransportConfig::default();
        let mut i = Interior::default();
        i.extend(0.06, 0.0, &cfg, |x| transport_exact(x, 0.0));
        assert_eq!(i.mesh.len(), 10);
        assert!(!i.uniform);
        i.extend(0.24, 0.0, &cfg, |x| transport_exact(x, 0.0));
        assert!(i.uniform);
        assert_eq!(i.mesh.len(), 13);
        for w in i.mesh.windows(2) {
            assert!((w[1] - w[0] - 0.02).abs() < 1e-12);
        }
        for (x, v) in i.mesh.iter().zip(&i.values) {
            assert!((v - transport_exact(*x, 0.0)).abs() < 1e-6);
        }
    }
}
