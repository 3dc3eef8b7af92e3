//! Stationary-velocity diffeomorphic image registration on the periodic
//! domain (0, 2π)³.

pub mod counters;
pub mod diffops;
pub mod error;
pub mod field;
pub mod grid;
pub mod interp;
pub mod io;
pub mod kernels;
pub mod metrics;
pub mod optim;
mod stencil;
pub mod synth;
pub mod transport;

pub use counters::{CounterSnapshot, KernelTimings, OperatorCounters};
pub use diffops::{DerivativeBackend, RegularizationConfig};
pub use error::{Error, Result};
pub use field::{inner_product, norm2, LabelMap, Real, ScalarField, VectorField};
pub use grid::{Axis, Grid};
pub use interp::{CoefficientField, DeparturePoints, InterpVariant};
pub use kernels::Kernels;
pub use metrics::{DeformationMap, DetFStats};
pub use optim::{RegistrationReport, SolveStatus, SolverConfig};
pub use transport::{TimeGrid, TrajectoryStore};
