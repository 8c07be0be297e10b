//! Kron reduction and directed weighted Laplacians for lossless DC
//! power-flow networks.

pub mod connectivity;
pub mod error;
pub mod graph_algebra;
pub mod linalg;
pub mod matrix;
pub mod netmodel;
pub mod powerflow;
pub mod reduction;

pub use error::{FlowError, MatrixError, NetworkError, OrientError, ParseError, PartitionError, ReductionError};
pub use matrix::LabeledMatrix;
pub use netmodel::{Network, NetworkBuilder, VertexId};
