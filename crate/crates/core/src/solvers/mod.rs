//! PDE drivers built on the adaptive controllers, plus reference solutions.

pub mod cell;
pub mod chebyshev;
pub mod parabolic;
pub mod references;
pub mod transport;

pub use cell::{solve_cell_model, CellModel, CellModelConfig, CellRecord, CellRun};
pub use chebyshev::ChebyshevInterior;
pub use parabolic::{
    assemble_stiffness, solve_parabolic, ParabolicConfig, ParabolicRecord, ParabolicRun,
    ScalingStrategy,
};
pub use transport::{solve_transport, Coupling, TransportConfig, TransportRecord, TransportRun};
