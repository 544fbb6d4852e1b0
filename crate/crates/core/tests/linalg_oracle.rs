//! Hand-written factorizations checked against nalgebra.

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use spindle_core::linalg::{householder_qr, jacobi_eigen, pinv, svd, symmetric_eigenvalues, DenseMatrix, RANK_RTOL};

fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn matrix(max: usize) -> impl Strategy<Value = DenseMatrix<f64>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0f64..5.0, r * c).prop_map(move |v| DenseMatrix::from_vec(r, c, v).unwrap())
    })
}

fn square(max: usize) -> impl Strategy<Value = DenseMatrix<f64>> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| DenseMatrix::from_vec(n, n, v).unwrap()))
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_match(m in matrix(9)) {
        let ours = svd(&m).unwrap().s;
        let theirs = sorted_desc(to_na(&m).singular_values().iter().copied().collect());
        prop_assert_eq!(ours.len(), theirs.len());
        for (a, b) in ours.iter().zip(&theirs) {
            prop_assert!((a - b).abs() < 1e-9 * theirs[0].max(1.0), "{:?} vs {:?}", ours, theirs);
        }
    }

    #[test]
    fn pseudo_inverse_matches(m in matrix(7)) {
        let ours = pinv(&m, RANK_RTOL).unwrap();
        let theirs = to_na(&m).pseudo_inverse(1e-10).unwrap();
        let scale = theirs.amax().max(1.0);
        for i in 0..ours.rows() {
            for j in 0..ours.cols() {
                prop_assert!((ours[(i, j)] - theirs[(i, j)]).abs() < 1e-7 * scale);
            }
        }
    }

    #[test]
    fn symmetric_spectrum_matches(m in matrix(8)) {
        let g = m.gram_rows();
        let ql = symmetric_eigenvalues(&g).unwrap();
        let (jac, _) = jacobi_eigen(&g).unwrap();
        let theirs = sorted_desc(to_na(&g).symmetric_eigen().eigenvalues.iter().copied().collect());
        let tol = 1e-9 * theirs[0].abs().max(1.0);
        for ((a, b), c) in ql.iter().zip(&jac).zip(&theirs) {
            prop_assert!((a - c).abs() < tol && (b - c).abs() < tol);
        }
    }

    #[test]
    fn qr_reconstructs(m in square(8)) {
        let (q, r) = householder_qr(&m).unwrap();
        prop_assert!(q.matmul(&r).unwrap().max_abs_diff(&m).unwrap() < 1e-10);
        prop_assert!(q.transpose().matmul(&q).unwrap().max_abs_diff(&DenseMatrix::identity(m.rows())).unwrap() < 1e-12);
        for i in 0..r.rows() {
            for j in 0..i {
                prop_assert!(r[(i, j)].abs() < 1e-12);
            }
        }
    }
}

#[test]
fn rank_deficient_pinv_against_nalgebra() {
    // rank 2 product of 6x2 and 2x5 factors
    let a = DenseMatrix::from_fn(6, 2, |i, j| (i as f64 + 1.0) * if j == 0 { 1.0 } else { -0.5 } + j as f64);
    let b = DenseMatrix::from_fn(2, 5, |i, j| (i * 5 + j) as f64 % 3.0 - 1.0);
    let m = a.matmul(&b).unwrap();
    let f = svd(&m).unwrap();
    assert_eq!(f.rank(RANK_RTOL), 2);
    let theirs = to_na(&m).pseudo_inverse(1e-10).unwrap();
    let ours = f.pinv(RANK_RTOL);
    for i in 0..5 {
        for j in 0..6 {
            assert_relative_eq!(ours[(i, j)], theirs[(i, j)], epsilon = 1e-10);
        }
    }
}

#[test]
fn single_precision_svd() {
    let m = DenseMatrix::<f32>::from_fn(4, 3, |i, j| ((i * 3 + j) as f32).sin());
    let ours = svd(&m).unwrap().s;
    let theirs = sorted_desc(to_na(&m.cast::<f64>()).singular_values().iter().copied().collect());
    for (a, b) in ours.iter().zip(&theirs) {
        assert_relative_eq!(*a as f64, *b, epsilon = 1e-4);
    }
}
