//! One-sided (Hestenes) Jacobi SVD.
//!
//! Column pairs are rotated until mutually orthogonal to working precision;
//! singular values are the final column norms. Slower than Golub–Kahan for
//! large matrices but accurate for small singular values, which matters for
//! rank decisions on integer-structured matrices.

use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Default relative cutoff below which singular values count as zero.
pub const RANK_RTOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(s) Vᵀ` with `p = min(m, n)` components, `s`
/// non-increasing.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    /// Number of singular values above `rtol * s_max`.
    pub fn rank(&self, rtol: f64) -> usize {
        numerical_rank(&self.s, rtol)
    }

    /// Moore–Penrose pseudo-inverse, `n x m`.
    pub fn pinv(&self, rtol: f64) -> DenseMatrix<T> {
        let r = self.rank(rtol);
        let (m, n) = (self.u.rows(), self.v.rows());
        DenseMatrix::from_fn(n, m, |i, j| {
            (0..r).fold(T::zero(), |acc, l| acc + self.v[(i, l)] * self.u[(j, l)] / self.s[l])
        })
    }
}

pub fn numerical_rank<T: Scalar>(s: &[T], rtol: f64) -> usize {
    let smax = s.iter().fold(T::zero(), |m, &x| m.max(x));
    if smax == T::zero() {
        return 0;
    }
    let cut = smax * T::of(rtol);
    s.iter().filter(|&&x| x > cut).count()
}

pub fn svd<T: Scalar>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    if a.is_empty() {
        return Err(Error::Invalid("SVD of an empty matrix".into()));
    }
    if a.rows() < a.cols() {
        let t = svd_tall(&a.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    svd_tall(a)
}

fn svd_tall<T: Scalar>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let tol = T::of(T::EPS * (m as f64).sqrt());

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Invalid(format!("Jacobi SVD did not converge on a {m}x{n} matrix")));
    }

    let mut order: Vec<(T, usize)> = cols.iter().map(|c| (dot(c, c).sqrt(), 0)).collect();
    for (j, o) in order.iter_mut().enumerate() {
        o.1 = j;
    }
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite singular values"));

    let s: Vec<T> = order.iter().map(|o| o.0).collect();
    let u = DenseMatrix::from_fn(m, n, |i, l| {
        let (sv, j) = order[l];
        if sv > T::zero() {
            cols[j][i] / sv
        } else {
            T::zero()
        }
    });
    let vm = DenseMatrix::from_fn(n, n, |i, l| v[order[l].1][i]);
    Ok(Svd { u, s, v: vm })
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

pub fn pinv<T: Scalar>(a: &DenseMatrix<T>, rtol: f64) -> Result<DenseMatrix<T>> {
    if a.is_empty() {
        return Ok(DenseMatrix::zeros(a.cols(), a.rows()));
    }
    Ok(svd(a)?.pinv(rtol))
}

/// Squared singular values, non-increasing.
pub fn squared_singular_values<T: Scalar>(a: &DenseMatrix<T>) -> Result<Vec<T>> {
    Ok(svd(a)?.s.into_iter().map(|x| x * x).collect())
}

/// Orthonormal basis (as columns) of the column span of `gen`.
pub fn orthonormal_basis<T: Scalar>(gen: &DenseMatrix<T>, rtol: f64) -> Result<DenseMatrix<T>> {
    let d = gen.rows();
    if gen.cols() == 0 {
        return Ok(DenseMatrix::zeros(d, 0));
    }
    let f = svd(gen)?;
    let r = f.rank(rtol);
    Ok(DenseMatrix::from_fn(d, r, |i, j| f.u[(i, j)]))
}

/// Norm of the component of `v` orthogonal to the columns of the
/// orthonormal `basis`.
pub fn projection_residual<T: Scalar>(basis: &DenseMatrix<T>, v: &[T]) -> Result<T> {
    let coeff = basis.t_matvec(v)?;
    let proj = basis.matvec(&coeff)?;
    Ok(v.iter().zip(&proj).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(f: &Svd<f64>) -> DenseMatrix<f64> {
        let us = DenseMatrix::from_fn(f.u.rows(), f.s.len(), |i, j| f.u[(i, j)] * f.s[j]);
        us.matmul(&f.v.transpose()).unwrap()
    }

    #[test]
    fn reconstructs_wide_and_tall() {
        let a = DenseMatrix::from_rows(&[
            vec![3.0, 1.0, 2.0, -1.0],
            vec![0.5, -2.0, 1.0, 4.0],
            vec![1.0, 1.0, 1.0, 1.0],
        ])
        .unwrap();
        for m in [a.clone(), a.transpose()] {
            let f = svd(&m).unwrap();
            assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(reconstruct(&f).max_abs_diff(&m).unwrap() < 1e-12);
            let utu = f.u.transpose().matmul(&f.u).unwrap();
            assert!(utu.max_abs_diff(&DenseMatrix::identity(3)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pinv_of_rank_deficient() {
        // rank 1
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.rank(RANK_RTOL), 1);
        let p = f.pinv(RANK_RTOL);
        // A A+ A = A
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.max_abs_diff(&a).unwrap() < 1e-12);
        // closed form for rank one: A+ = Aᵀ / ‖A‖_F²
        let expect = a.transpose().scale(1.0 / 70.0);
        assert!(p.max_abs_diff(&expect).unwrap() < 1e-14);
    }

    #[test]
    fn residual_outside_span() {
        let gen = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let b = orthonormal_basis(&gen, RANK_RTOL).unwrap();
        assert_eq!(b.cols(), 2);
        assert!(projection_residual(&b, &[2.0, -3.0, 0.0]).unwrap() < 1e-14);
        assert!((projection_residual(&b, &[2.0, -3.0, 5.0]).unwrap() - 5.0f64).abs() < 1e-14);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(svd(&DenseMatrix::<f64>::zeros(0, 0)).is_err());
    }
}
