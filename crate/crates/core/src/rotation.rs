//! Orthogonal matrices and the paired-run rotation invariance check.

use crate::error::{dim_err, invalid, Result};
use crate::hadamard::HadamardMatrix;
use crate::learners::{LearnerConfig, LearnerKind, Model, Predictor};
use crate::linalg::{householder_qr, DenseMatrix};
use crate::problems::{Problem, SignPattern};
use crate::rng;
use crate::scalar::Scalar;

/// Square matrix with `UᵀU = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix<T>(DenseMatrix<T>);

impl<T: Scalar> OrthogonalMatrix<T> {
    /// Checks `UᵀU = I` entrywise to `tol`.
    pub fn new(m: DenseMatrix<T>, tol: f64) -> Result<Self> {
        if m.rows() != m.cols() {
            return dim_err("orthogonal matrix must be square");
        }
        let err = orthogonality_error(&m)?;
        if err > tol {
            return invalid(format!("UᵀU deviates from I by {err}"));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }
}

/// `max |UᵀU - I|`
pub fn orthogonality_error<T: Scalar>(u: &DenseMatrix<T>) -> Result<f64> {
    let utu = u.transpose().matmul(u)?;
    Ok(utu.max_abs_diff(&DenseMatrix::identity(u.cols()))?.f64())
}

/// Haar distributed: QR of a standard Gaussian matrix with the signs of
/// `diag(R)` folded into `Q`.
pub fn random_orthogonal<T: Scalar>(d: usize, seed: u64) -> Result<OrthogonalMatrix<T>> {
    if d == 0 {
        return invalid("d must be at least 1");
    }
    let z = rng::normals(&mut rng::stream(seed, "haar", 0), d * d);
    let g = DenseMatrix::from_vec(d, d, z)?;
    let (q, r) = householder_qr(&g)?;
    let signs: Vec<f64> = (0..d).map(|i| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }).collect();
    let u = DenseMatrix::from_fn(d, d, |i, j| T::of(q[(i, j)] * signs[j]));
    Ok(OrthogonalMatrix(u))
}

/// `diag(s) H / √d`
pub fn hadamard_rotation<T: Scalar>(s: &SignPattern, h: &HadamardMatrix) -> Result<OrthogonalMatrix<T>> {
    let d = h.dim();
    if s.len() != d {
        return dim_err(format!("sign pattern of length {} for d = {d}", s.len()));
    }
    let scale = 1.0 / (d as f64).sqrt();
    Ok(OrthogonalMatrix(DenseMatrix::from_fn(d, d, |i, j| {
        T::of(s.signs[i] as f64 * h.entry(i, j) as f64 * scale)
    })))
}

/// `X ← X Uᵀ`; labels unchanged.
pub fn rotate_problem<T: Scalar>(p: &Problem<T>, u: &OrthogonalMatrix<T>) -> Result<Problem<T>> {
    if u.dim() != p.dim() {
        return dim_err(format!("rotation of size {} for d = {}", u.dim(), p.dim()));
    }
    let mut out = p.clone();
    out.x = p.x.matmul(&u.0.transpose())?;
    Ok(out)
}

/// Train `kind` from a fresh init on `(X_tr, y)` and, in a paired run, from
/// the rotated init `U W₀` on `(X_tr Uᵀ, y)`. Returns the largest
/// `|ŷ(x) - ŷ'(U x)|` over all rows of `p`.
pub fn invariance_test<T: Scalar>(
    kind: LearnerKind,
    cfg: &LearnerConfig<T>,
    p: &Problem<T>,
    u: &OrthogonalMatrix<T>,
    k: usize,
    paired_seed: u64,
) -> Result<f64> {
    let rotated = rotate_problem(p, u)?;
    let mut plain = Model::init(kind, p.dim(), cfg, paired_seed)?;
    let mut turned = plain.clone();
    turned.rotate_input(u.matrix())?;
    plain.fit(kind, p, k, cfg)?;
    turned.fit(kind, &rotated, k, cfg)?;
    let mut worst: f64 = 0.0;
    for t in 0..p.n() {
        let a = plain.predict(p.x.row(t));
        let b = turned.predict(rotated.x.row(t));
        worst = worst.max((a - b).abs().f64());
    }
    Ok(worst)
}
