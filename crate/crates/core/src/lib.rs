//! Quantum and mean-field dynamics of three coupled condensate modes.
//!
//! The Hamiltonian is written in terms of the eight SU(3) Schwinger-boson
//! generators built from the mode operators of a symmetric ring of wells.
//! [`dynamics`] propagates exact many-body states in a fixed-`N` Fock basis,
//! [`semiclassical`] integrates the large-`N` limit reduced to four variables,
//! and [`analysis`] locates its fixed points and the self-trapping threshold.

pub mod analysis;
pub mod basis;
pub mod dynamics;
pub mod error;
pub mod ode;
pub mod operators;
pub mod roots;
pub mod semiclassical;
pub mod series;
pub mod sparse;

pub use basis::{FockBasis, Occupation, DEFAULT_MAX_ATOMS};
pub use dynamics::{Observable, Propagator, QuantumState};
pub use error::{Error, Result};
pub use operators::{Generator, ModelParams, OperatorMatrix};
pub use semiclassical::{ReducedState, Trajectory};
pub use series::TimeSeries;
pub use sparse::SparseMatrix;
