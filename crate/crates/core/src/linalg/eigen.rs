//! Symmetric eigenvalue solvers. Two independent routes: Householder
//! tridiagonalization followed by implicit QL (values only, O(n³)), and the
//! cyclic Jacobi method (values and vectors).

use crate::error::{dim_err, Error, Result};
use crate::linalg::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Eigenvalues of a symmetric matrix, non-increasing.
pub fn symmetric_eigenvalues<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    let n = a.rows();
    if a.cols() != n {
        return dim_err("eigenvalues of a non-square matrix");
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let (mut d, mut e) = tridiagonalize(&mut w);
    implicit_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    Ok(d)
}

fn tridiagonalize<T: Scalar>(a: &mut [Vec<T>]) -> (Vec<T>, Vec<T>) {
    let n = a.len();
    let zero = T::zero();
    let mut d = vec![zero; n];
    let mut e = vec![zero; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = zero;
        if l > 0 {
            let scale: T = a[i][..=l].iter().map(|x| x.abs()).sum();
            if scale == zero {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] = a[i][k] / scale;
                    h = h + a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= zero { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                a[i][l] = f - g;
                let mut f = zero;
                for j in 0..=l {
                    let mut g = zero;
                    for k in 0..=j {
                        g = g + a[j][k] * a[i][k];
                    }
                    for k in (j + 1)..=l {
                        g = g + a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f = f + e[j] * a[i][j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] = a[j][k] - (f * e[k] + g * a[i][k]);
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        let _ = h;
    }
    e[0] = zero;
    for i in 0..n {
        d[i] = a[i][i];
    }
    (d, e)
}

fn implicit_ql<T: Scalar>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let two = T::of(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::of(T::EPS) * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Invalid("implicit QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= zero { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), zero);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == zero {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = zero;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = zero;
        }
    }
    Ok(())
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns the
/// eigenvalues (non-increasing) and the matching eigenvectors as columns.
pub fn jacobi_eigen<T: Scalar>(a: &DenseMatrix<T>) -> Result<(Vec<T>, DenseMatrix<T>)> {
    let n = a.rows();
    if a.cols() != n {
        return dim_err("eigendecomposition of a non-square matrix");
    }
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = m.frobenius_sq().sqrt();
    let tol = T::of(T::EPS) * scale.max(T::min_positive_value());
    for _ in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= tol {
            let mut pairs: Vec<(T, usize)> = (0..n).map(|i| (m[(i, i)], i)).collect();
            pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));
            let vals = pairs.iter().map(|p| p.0).collect();
            let vecs = DenseMatrix::from_fn(n, n, |i, l| v[(i, pairs[l].1)]);
            return Ok((vals, vecs));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::of(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Invalid("Jacobi eigensolver did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn routes_agree() {
        let a = sample();
        let ql = symmetric_eigenvalues(&a).unwrap();
        let (jac, vecs) = jacobi_eigen(&a).unwrap();
        for (x, y) in ql.iter().zip(&jac) {
            assert!((x - y).abs() < 1e-12, "{ql:?} vs {jac:?}");
        }
        let trace: f64 = (0..4).map(|i| a[(i, i)]).sum();
        assert!((ql.iter().sum::<f64>() - trace).abs() < 1e-12);
        // A V = V Λ
        let av = a.matmul(&vecs).unwrap();
        let vl = DenseMatrix::from_fn(4, 4, |i, j| vecs[(i, j)] * jac[j]);
        assert!(av.max_abs_diff(&vl).unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_and_trivial() {
        let d = DenseMatrix::diag(&[1.0, 5.0, 3.0]);
        assert_eq!(symmetric_eigenvalues(&d).unwrap(), vec![5.0, 3.0, 1.0]);
        assert_eq!(symmetric_eigenvalues(&DenseMatrix::diag(&[2.0])).unwrap(), vec![2.0]);
        assert!(symmetric_eigenvalues(&DenseMatrix::<f64>::zeros(2, 3)).is_err());
    }
}
