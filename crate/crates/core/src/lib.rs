//! Adaptive spectral methods on unbounded domains.
//!
//! Scaled/translated Laguerre and Hermite expansions ([`basis`], [`approx`]),
//! the frequency and exterior-error indicators ([`indicators`]), the scaling and
//! moving controllers ([`adapt`]), PDE drivers built on them ([`solvers`]) and
//! the worked examples as runnable experiments ([`experiments`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod adapt;
pub mod approx;
pub mod basis;
pub mod error;
pub mod experiments;
pub mod indicators;
pub mod solvers;

pub use adapt::{AdaptConfig, AdaptState, ExperimentRecord, Mode};
pub use approx::{Expansion, Expansion2D};
pub use basis::{BasisFamily, QuadratureRule, RuleKind, ScaledBasis};
pub use error::{Result, SpectralError};
pub use indicators::IndicatorConfig;
