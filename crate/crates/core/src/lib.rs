//! Superposition measures for mixed quantum states relative to a decomposition
//! of the Hilbert space into orthogonal subspaces.

pub mod channels;
pub mod cli;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod interferometer;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod operator;
pub mod random;
pub mod secondq;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec};
pub use measures::{MeasureReport, NormSpec, Witness};
pub use operator::{Decomposition, DensityOperator, Operator, PureStateEnsemble};
