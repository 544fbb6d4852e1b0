//! Dense linear algebra over a generic [`Scalar`](crate::Scalar).

pub mod eigen;
pub mod matrix;
pub mod qr;
pub mod svd;

pub use eigen::{jacobi_eigen, symmetric_eigenvalues};
pub use matrix::{axpy, dot, max_abs, norm, DenseMatrix};
pub use qr::householder_qr;
pub use svd::{
    numerical_rank, orthonormal_basis, pinv, projection_residual, squared_singular_values, svd,
    Svd, RANK_RTOL,
};
