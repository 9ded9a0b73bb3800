//! Worked examples as runnable, parameterised experiments.

use rayon::prelude::*;

use crate::adapt::{
    run, run_2d, AdaptConfig, Evolver, Evolver2D, Mode, Record2D, Resample, Resample2D, Table,
};
use crate::approx::{Expansion, Expansion2D};
use crate::basis::ScaledBasis;
use crate::error::{Result, SpectralError};
use crate::solvers::chebyshev::{gauss_legendre, ChebyshevInterior};
use crate::solvers::references::{
    drifting_2d, fermi_dirac_diffusive, fermi_dirac_moving, oscillating_front,
};
use crate::solvers::{
    solve_cell_model, solve_parabolic, solve_transport, CellModelConfig, ParabolicConfig,
    ScalingStrategy, TransportConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    FdDiffuse,
    FdMove,
    Oscillate,
    TwoDim,
    Transport,
    Parabolic,
    Cellpop,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::FdDiffuse,
        Self::FdMove,
        Self::Oscillate,
        Self::TwoDim,
        Self::Transport,
        Self::Parabolic,
        Self::Cellpop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FdDiffuse => "fd-diffuse",
            Self::FdMove => "fd-move",
            Self::Oscillate => "oscillate",
            Self::TwoDim => "two-dim",
            Self::Transport => "transport",
            Self::Parabolic => "parabolic",
            Self::Cellpop => "cellpop",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| SpectralError::InvalidParameter(format!("unknown experiment '{s}'")))
    }

    /// One-line description for help output.
    pub fn describe(self) -> &'static str {
        match self {
            Self::FdDiffuse => "diffusive Fermi-Dirac profile 1/(1+e^((x-5)/(2+t)))",
            Self::FdMove => "Fermi-Dirac profile translating at speed 5",
            Self::Oscillate => {
                "cosine wave with Gaussian front moving at speed 10, split interior/exterior"
            }
            Self::TwoDim => "2D profile drifting and spreading in both directions",
            Self::Transport => "variable-speed transport, FD interior + Laguerre exterior",
            Self::Parabolic => "heat equation on the line, Hermite-Galerkin with Crank-Nicolson",
            Self::Cellpop => "sizer-timer cell population model",
        }
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::None => "none",
        Mode::ScaleOnly => "scale",
        Mode::MoveOnly => "move",
        Mode::MoveScale => "move-scale",
    }
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "none" => Ok(Mode::None),
        "scale" => Ok(Mode::ScaleOnly),
        "move" => Ok(Mode::MoveOnly),
        "move-scale" => Ok(Mode::MoveScale),
        _ => Err(SpectralError::InvalidParameter(format!(
            "unknown mode '{s}'"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Fixed,
    TimeDependent,
    FrequencyDependent,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::TimeDependent => "time-dependent",
            Self::FrequencyDependent => "frequency-dependent",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        [Self::Fixed, Self::TimeDependent, Self::FrequencyDependent]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SpectralError::InvalidParameter(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub mode: Mode,
    pub n: usize,
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub q: f64,
    pub nu: f64,
    pub mu: f64,
    pub delta: f64,
    pub d_max: f64,
    pub beta_min: f64,
    /// Parabolic only.
    pub strategy: StrategyKind,
}

impl ExperimentSpec {
    /// Default parameters of each worked example.
    pub fn defaults(experiment: Experiment) -> Self {
        let base = AdaptConfig::default();
        let spec = Self {
            experiment,
            mode: Mode::ScaleOnly,
            n: 40,
            beta: 2.5,
            dt: 0.01,
            t_end: 10.0,
            q: base.q,
            nu: base.nu,
            mu: base.mu,
            delta: base.delta,
            d_max: base.d_max,
            beta_min: base.beta_min,
            strategy: StrategyKind::FrequencyDependent,
        };
        match experiment {
            Experiment::FdDiffuse => spec,
            // speed 5 needs Δt·5 ≤ d_max
            Experiment::FdMove => Self {
                mode: Mode::MoveOnly,
                dt: 0.001,
                ..spec
            },
            // the front then advances exactly δ per step
            Experiment::Oscillate => Self {
                mode: Mode::MoveOnly,
                n: 30,
                beta: 5.0,
                dt: 0.0008,
                mu: 1.001,
                delta: 0.008,
                d_max: 0.08,
                ..spec
            },
            Experiment::TwoDim => Self {
                mode: Mode::MoveScale,
                t_end: 4.0,
                mu: 1.003,
                delta: 0.005,
                d_max: 0.1,
                ..spec
            },
            Experiment::Transport => Self {
                mode: Mode::MoveScale,
                dt: 0.001,
                t_end: 5.0,
                mu: 1.004,
                delta: 0.02,
                d_max: 0.2,
                ..spec
            },
            Experiment::Parabolic => Self {
                n: 20,
                beta: 0.85,
                dt: 1.0 / 4000.0,
                t_end: 1.0,
                ..spec
            },
            Experiment::Cellpop => Self {
                n: 20,
                beta: 0.9,
                dt: 0.002,
                ..spec
            },
        }
    }

    pub fn adapt(&self) -> AdaptConfig {
        AdaptConfig {
            nu: self.nu,
            q: self.q,
            beta_min: self.beta_min,
            mu: self.mu,
            delta: self.delta,
            d_max: self.d_max,
            anchor_e0: !matches!(
                self.experiment,
                Experiment::Transport | Experiment::Oscillate
            ),
            refresh_e0: self.experiment == Experiment::TwoDim,
            ..AdaptConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(SpectralError::InvalidParameter(what.to_string()));
        if self.n < 2 {
            return bad("N must be at least 2");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(self.dt > 0.0 && self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("dt and T must be positive");
        }
        self.adapt().validate()
    }
}

/// Result of one experiment run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub history: Table,
    pub final_error: Option<f64>,
    pub final_freq: Option<f64>,
    pub final_beta: f64,
    /// (t, text dump of the expansion) for each requested snapshot time.
    pub snapshots: Vec<(f64, String)>,
    /// Named scalar diagnostics (move/rescale counts, derived errors).
    pub summary: Vec<(&'static str, f64)>,
}

impl Outcome {
    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
    }
}

/// Step indices at which to dump the state.
fn snapshot_steps(times: &[f64], dt: f64, t_end: f64) -> Result<Vec<usize>> {
    times
        .iter()
        .map(|&t| {
            if !(0.0..=t_end + 1e-12).contains(&t) {
                return Err(SpectralError::InvalidParameter(format!(
                    "snapshot time {t} outside [0, {t_end}]"
                )));
            }
            Ok((t / dt).round() as usize)
        })
        .collect()
}

/// Records the incoming state at selected steps; the state at the start of
/// step k is the adapted solution at t_k.
struct Capture<E> {
    inner: E,
    steps: Vec<usize>,
    dt: f64,
    out: Vec<(f64, String)>,
}

impl<E> Capture<E> {
    fn take(&mut self, t: f64, text: impl FnOnce() -> String) {
        let k = (t / self.dt).round() as usize;
        if self.steps.contains(&k)
            && !self
                .out
                .iter()
                .any(|(s, _)| (s / self.dt).round() as usize == k)
        {
            self.out.push((t, text()));
        }
    }
}

impl<E: Evolver> Evolver for Capture<E> {
    fn step(&mut self, u: &Expansion, t: f64, dt: f64) -> Result<Expansion> {
        self.take(t, || u.to_text());
        self.inner.step(u, t, dt)
    }
}

impl<E: Evolver2D> Evolver2D for Capture<E> {
    fn step(&mut self, u: &Expansion2D, t: f64, dt: f64) -> Result<Expansion2D> {
        self.take(t, || u.to_text());
        self.inner.step(u, t, dt)
    }
}

fn no_snapshots(e: Experiment, times: &[f64]) -> Result<()> {
    if times.is_empty() {
        Ok(())
    } else {
        Err(SpectralError::InvalidParameter(format!(
            "snapshots are not available for {}",
            e.name()
        )))
    }
}

pub fn run_experiment(spec: &ExperimentSpec, snapshot_times: &[f64]) -> Result<Outcome> {
    spec.validate()?;
    let steps = snapshot_steps(snapshot_times, spec.dt, spec.t_end)?;
    match spec.experiment {
        Experiment::FdDiffuse => run_1d(spec, fermi_dirac_diffusive, steps),
        Experiment::FdMove => run_1d(spec, fermi_dirac_moving, steps),
        Experiment::Oscillate => run_oscillate(spec, steps),
        Experiment::TwoDim => run_two_dim(spec, steps),
        Experiment::Transport => {
            no_snapshots(spec.experiment, snapshot_times)?;
            let cfg = TransportConfig {
                n: spec.n,
                beta: spec.beta,
                dt: spec.dt,
                t_end: spec.t_end,
                mode: spec.mode,
                adapt: spec.adapt(),
                ..TransportConfig::default()
            };
            let r = solve_transport(&cfg)?;
            let last = r.last();
            let max_whole = r.history.iter().map(|h| h.whole_error).fold(0.0, f64::max);
            let max_freq = r.history.iter().filter_map(|h| h.freq).fold(0.0, f64::max);
            Ok(Outcome {
                history: r.table(),
                final_error: Some(last.whole_error),
                final_freq: last.freq,
                final_beta: last.beta,
                snapshots: Vec::new(),
                summary: vec![
                    ("moves", r.moves as f64),
                    ("rescales", r.rescales as f64),
                    ("x_L", last.x_l),
                    ("exterior_error", last.exterior_error),
                    ("max_whole_error", max_whole),
                    ("max_freq", max_freq),
                ],
            })
        }
        Experiment::Parabolic => {
            no_snapshots(spec.experiment, snapshot_times)?;
            let strategy = match spec.strategy {
                StrategyKind::Fixed => ScalingStrategy::Fixed(spec.beta),
                StrategyKind::TimeDependent => ScalingStrategy::TimeDependent {
                    delta0: 1.0,
                    delta: 1.0,
                },
                StrategyKind::FrequencyDependent => ScalingStrategy::FrequencyDependent {
                    beta0: spec.beta,
                    adapt: spec.adapt(),
                },
            };
            let r = solve_parabolic(&ParabolicConfig {
                n: spec.n,
                dt: spec.dt,
                t_end: spec.t_end,
                strategy,
            })?;
            let last = *r.last();
            Ok(Outcome {
                history: r.table(),
                final_error: Some(last.e_n),
                final_freq: last.freq,
                final_beta: last.beta,
                snapshots: Vec::new(),
                summary: vec![("rescales", r.rescales as f64), ("E_N_inf", last.e_inf)],
            })
        }
        Experiment::Cellpop => {
            no_snapshots(spec.experiment, snapshot_times)?;
            let cfg = CellModelConfig {
                n: spec.n,
                beta_x: spec.beta,
                dt: spec.dt,
                t_end: spec.t_end,
                scale_x: spec.mode.scales(),
                adapt: spec.adapt(),
                ..CellModelConfig::example()
            };
            let r = solve_cell_model(&cfg)?;
            let last = r.last();
            Ok(Outcome {
                history: r.table(),
                final_error: last.error,
                final_freq: last.freq_x,
                final_beta: last.beta_x,
                snapshots: Vec::new(),
                summary: vec![
                    ("rescales_x", r.rescales_x as f64),
                    ("rescales_a", r.rescales_a as f64),
                    ("beta_a", last.beta_a),
                    ("mean_size", last.mean_size),
                    ("negative_warnings", r.negative_warnings as f64),
                ],
            })
        }
    }
}

fn finish_1d<E: Evolver>(
    spec: &ExperimentSpec,
    mut capture: Capture<E>,
    reference: fn(f64, f64) -> f64,
) -> Result<(crate::adapt::AdaptState, Vec<(f64, String)>)> {
    let basis = ScaledBasis::laguerre_function(0.0, spec.beta, 0.0, spec.n)?;
    let initial = Expansion::from_fn(basis, |x| reference(x, 0.0))?;
    let state = run(
        &mut capture,
        initial,
        &spec.adapt(),
        spec.dt,
        spec.t_end,
        spec.mode,
        Some(&reference),
    )?;
    capture.take(state.t, || state.expansion.to_text());
    Ok((state, capture.out))
}

fn run_1d(
    spec: &ExperimentSpec,
    reference: fn(f64, f64) -> f64,
    steps: Vec<usize>,
) -> Result<Outcome> {
    let capture = Capture {
        inner: Resample(reference),
        steps,
        dt: spec.dt,
        out: Vec::new(),
    };
    let (state, snapshots) = finish_1d(spec, capture, reference)?;
    let last = state.history.last().expect("initial record");
    let max_error = state
        .history
        .iter()
        .filter_map(|r| r.error)
        .fold(0.0, f64::max);
    Ok(Outcome {
        history: crate::adapt::history_table(&state.history),
        final_error: last.error,
        final_freq: last.freq,
        final_beta: last.beta,
        snapshots,
        summary: vec![
            ("moves", state.moves as f64),
            ("rescales", state.rescales as f64),
            ("x_L", last.x_l),
            ("max_error", max_error),
        ],
    })
}

/// Chebyshev degree of the interior patch in the oscillating example.
pub const OSCILLATE_INTERIOR_DEGREE: usize = 80;
/// Order of the single unsplit expansion the oscillating example compares to.
pub const OSCILLATE_UNSPLIT_ORDER: usize = 180;

/// Relative L² error over (0, ∞) of a Chebyshev interior on [0, x_L] joined
/// to the exterior expansion.
pub fn whole_line_error(exterior: &Expansion, k: usize, t: f64) -> Result<f64> {
    let exact = |x: f64| oscillating_front(x, t);
    let (en, ed) = exterior.error_sums(exact)?;
    let x_l = exterior.basis.x_l;
    if x_l <= 0.0 {
        return Ok((en / ed).sqrt());
    }
    let interior = ChebyshevInterior::from_fn(k, 0.0, x_l, exact)?;
    // five-point panels, several per wavelength
    let panels = ((x_l * 4.0).ceil() as usize).max(8);
    let inum = gauss_legendre(
        |x| (interior.evaluate(x) - exact(x)).powi(2),
        0.0,
        x_l,
        panels,
    );
    let iden = gauss_legendre(|x| exact(x).powi(2), 0.0, x_l, panels);
    Ok(((en + inum) / (ed + iden)).sqrt())
}

/// Relative L² and maximum pointwise error of one Laguerre-function
/// interpolant on (0, ∞) at time t.
pub fn unsplit_error(n: usize, beta: f64, t: f64) -> Result<(f64, f64)> {
    let basis = ScaledBasis::laguerre_function(0.0, beta, 0.0, n)?;
    let u = Expansion::from_fn(basis, |x| oscillating_front(x, t))?;
    let exact = |x: f64| oscillating_front(x, t);
    // measure on a fine independent rule rather than at the collocation nodes
    let end = 10.0 * t + 12.0;
    let panels = ((end * 4.0).ceil() as usize).max(8);
    let diff = |x: f64| u.evaluate(x).unwrap_or(f64::NAN) - exact(x);
    let num = gauss_legendre(|x| diff(x).powi(2), 0.0, end, panels);
    let den = gauss_legendre(|x| exact(x).powi(2), 0.0, end, panels);
    let samples = (end * 200.0) as usize;
    let worst = (0..=samples)
        .map(|k| diff(end * k as f64 / samples as f64).abs())
        .fold(0.0, f64::max);
    Ok(((num / den).sqrt(), worst))
}

fn run_oscillate(spec: &ExperimentSpec, steps: Vec<usize>) -> Result<Outcome> {
    let capture = Capture {
        inner: Resample(oscillating_front),
        steps,
        dt: spec.dt,
        out: Vec::new(),
    };
    let (state, snapshots) = finish_1d(spec, capture, oscillating_front)?;
    let last = *state.history.last().expect("initial record");
    let max_error = state
        .history
        .iter()
        .filter_map(|r| r.error)
        .fold(0.0, f64::max);
    let whole = whole_line_error(&state.expansion, OSCILLATE_INTERIOR_DEGREE, state.t)?;
    let unsplit = unsplit_error(OSCILLATE_UNSPLIT_ORDER, spec.beta, state.t)?;
    let worst_lag = state
        .history
        .iter()
        .map(|r| (r.x_l - 10.0 * r.t).abs())
        .fold(0.0, f64::max);
    let mut history = crate::adapt::history_table(&state.history);
    history.header.push("whole_error".into());
    let n_rows = history.rows.len();
    for (k, row) in history.rows.iter_mut().enumerate() {
        row.push(if k + 1 == n_rows { Some(whole) } else { None });
    }
    Ok(Outcome {
        history,
        final_error: last.error,
        final_freq: last.freq,
        final_beta: last.beta,
        snapshots,
        summary: vec![
            ("moves", state.moves as f64),
            ("x_L", last.x_l),
            ("max_error", max_error),
            ("max_front_lag", worst_lag),
            ("whole_error", whole),
            ("unsplit_error", unsplit.0),
            ("unsplit_max_error", unsplit.1),
        ],
    })
}

fn run_two_dim(spec: &ExperimentSpec, steps: Vec<usize>) -> Result<Outcome> {
    let basis = ScaledBasis::laguerre_function(0.0, spec.beta, 0.0, spec.n)?;
    let initial = Expansion2D::from_fn(basis, basis, |x, y| drifting_2d(x, y, 0.0))?;
    let mut capture = Capture {
        inner: Resample2D(drifting_2d),
        steps,
        dt: spec.dt,
        out: Vec::new(),
    };
    let s = run_2d(
        &mut capture,
        initial,
        &spec.adapt(),
        spec.dt,
        spec.t_end,
        spec.mode,
        Some(&drifting_2d),
    )?;
    capture.take(s.t, || s.expansion.to_text());
    let last = *s.history.last().expect("initial record");
    let max_error = s.history.iter().filter_map(|r| r.error).fold(0.0, f64::max);
    Ok(Outcome {
        history: Record2D::table(&s.history),
        final_error: last.error,
        final_freq: match (last.freq_x, last.freq_y) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        },
        final_beta: last.beta_x,
        snapshots: capture.out,
        summary: vec![
            ("moves_x", s.moves[0] as f64),
            ("moves_y", s.moves[1] as f64),
            ("rescales_x", s.rescales[0] as f64),
            ("rescales_y", s.rescales[1] as f64),
            ("beta_y", last.beta_y),
            ("x_L", last.x_l),
            ("y_L", last.y_l),
            ("max_error", max_error),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error_final: f64,
    pub f_final: Option<f64>,
    pub beta_final: f64,
}

#[derive(Debug, Clone)]
pub struct Convergence {
    pub rows: Vec<ConvergenceRow>,
    /// Full outcome per N, same order as `rows`.
    pub outcomes: Vec<Outcome>,
}

impl Convergence {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["N", "error_final", "F_final", "beta_final"]);
        for r in &self.rows {
            t.push(vec![
                Some(r.n as f64),
                Some(r.error_final),
                r.f_final,
                Some(r.beta_final),
            ]);
        }
        t
    }

    /// Algebraic decay order −ln(e₂/e₁)/ln(N₂/N₁) between consecutive rows.
    pub fn orders(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| {
                -(w[1].error_final / w[0].error_final).ln() / (w[1].n as f64 / w[0].n as f64).ln()
            })
            .collect()
    }

    pub fn orders_table(&self) -> Table {
        let mut t = Table::new(&["N_from", "N_to", "order"]);
        for (w, p) in self.rows.windows(2).zip(self.orders()) {
            t.push(vec![Some(w[0].n as f64), Some(w[1].n as f64), Some(p)]);
        }
        t
    }
}

/// Runs `spec` once per N (in parallel), all else fixed.
pub fn convergence_sweep(spec: &ExperimentSpec, ns: &[usize]) -> Result<Convergence> {
    if ns.len() < 2 {
        return Err(SpectralError::InvalidParameter(
            "a sweep needs at least two values of N".into(),
        ));
    }
    let outcomes: Vec<Outcome> = ns
        .par_iter()
        .map(|&n| run_experiment(&ExperimentSpec { n, ..*spec }, &[]))
        .collect::<Result<_>>()?;
    let rows = ns
        .iter()
        .zip(&outcomes)
        .map(|(&n, o)| ConvergenceRow {
            n,
            error_final: o.final_error.unwrap_or(f64::NAN),
            f_final: o.final_freq,
            beta_final: o.final_beta,
        })
        .collect();
    Ok(Convergence { rows, outcomes })
}
