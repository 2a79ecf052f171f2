pub mod cli;
pub mod cloner;
pub mod curve;
pub mod error;
pub mod format;
pub mod protocols;
mod roots;
pub mod sim;

pub use cloner::{OptimalSolution, PriorWeights};
pub use curve::{CloningProblem, CurvePoint, FlagOverlap};
pub use error::{CloneError, Result};
