//! Detection relations and consistent value assignment for elementary quantum
//! observables, with exact finite-dimensional no-go checks.

pub mod assignment;
pub mod detection;
pub mod ensemble;
pub mod error;
pub mod numerics;
pub mod observables;
pub mod random;
pub mod scenarios;

pub use error::{Error, Result};
pub use numerics::{CMatrix, Tolerance, C64};
pub use observables::{DensityOperator, PMObservable, Projection, Sign};
