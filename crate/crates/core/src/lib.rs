//! Hard problems for rotation invariant gradient descent learners, the
//! learners themselves, and the lower-bound curves they are held against.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod hadamard;
pub mod io;
pub mod learners;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod rotation;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type Matrix32 = linalg::DenseMatrix<f32>;
pub type F64Problem = problems::Problem<f64>;
pub type F64Config = learners::LearnerConfig<f64>;
