use crate::error::{dim_err, Result};
use crate::linalg::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Householder QR of a square matrix: `A = Q R`, `Q` orthogonal, `R` upper
/// triangular.
pub fn householder_qr<T: Scalar>(a: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let n = a.rows();
    if a.cols() != n {
        return dim_err("householder_qr expects a square matrix");
    }
    let mut r = a.clone();
    let mut q = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let x: Vec<T> = (k..n).map(|i| r[(i, k)]).collect();
        let alpha = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let alpha = if x[0] > T::zero() { -alpha } else { alpha };
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&t| t * t).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::of(2.0);
        // R <- (I - 2 v vᵀ / vᵀv) R on rows k..n
        for j in 0..n {
            let s: T = (k..n).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = two * s / vnorm2;
            for i in k..n {
                r[(i, j)] = r[(i, j)] - f * v[i - k];
            }
        }
        // Q <- Q (I - 2 v vᵀ / vᵀv) on columns k..n
        for i in 0..n {
            let s: T = (k..n).map(|j| q[(i, j)] * v[j - k]).sum();
            let f = two * s / vnorm2;
            for j in k..n {
                q[(i, j)] = q[(i, j)] - f * v[j - k];
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            r[(i, j)] = T::zero();
        }
    }
    Ok((q, r))
}
