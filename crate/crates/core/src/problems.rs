//! Randomized hard-problem families.
//!
//! All rows are 0-based: the training prefix for `k` examples is rows
//! `0..k`. Column indices are 0-based too; the permuted family needs
//! `column ∈ 1..d` since column 0 is constant.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, invalid, Error, Result};
use crate::hadamard::{HadamardMatrix, StrippedHadamard};
use crate::linalg::{norm, DenseMatrix};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    SignFlip,
    Complement01,
    Permuted,
    GaussianSparse,
    Duplicated,
    DoubledHadamard,
    ShiftedDoubled,
    /// i.i.d. uniform ±1 instances with a single-feature target.
    RandomSign,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::SignFlip => "sign-flip",
            Family::Complement01 => "complement",
            Family::Permuted => "permuted",
            Family::GaussianSparse => "gaussian",
            Family::Duplicated => "duplicated",
            Family::DoubledHadamard => "doubled",
            Family::ShiftedDoubled => "shifted-doubled",
            Family::RandomSign => "random-sign",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            Family::SignFlip,
            Family::Complement01,
            Family::Permuted,
            Family::GaussianSparse,
            Family::Duplicated,
            Family::DoubledHadamard,
            Family::ShiftedDoubled,
            Family::RandomSign,
        ]
        .into_iter()
        .find(|f| f.tag() == s)
        .ok_or_else(|| Error::Parse(format!("unknown problem family '{s}'")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelRange {
    PlusMinusOne,
    ZeroOne,
    Real,
}

impl LabelRange {
    /// Default prediction clipping interval for this label range.
    pub fn clip<T: Scalar>(self) -> Option<(T, T)> {
        match self {
            LabelRange::PlusMinusOne => Some((-T::one(), T::one())),
            LabelRange::ZeroOne => Some((T::zero(), T::one())),
            LabelRange::Real => None,
        }
    }
}

/// A learning problem: instance rows `x`, one or more target columns `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem<T> {
    pub x: DenseMatrix<T>,
    pub y: DenseMatrix<T>,
    pub target_index: usize,
    pub family: Family,
    pub seed: u64,
    pub label_range: LabelRange,
}

impl<T: Scalar> Problem<T> {
    pub fn new(
        x: DenseMatrix<T>,
        y: DenseMatrix<T>,
        family: Family,
        seed: u64,
        label_range: LabelRange,
    ) -> Result<Self> {
        if x.rows() != y.rows() {
            return dim_err(format!("{} instance rows but {} label rows", x.rows(), y.rows()));
        }
        if y.cols() == 0 {
            return dim_err("problem needs at least one target column");
        }
        Ok(Self { x, y, target_index: 0, family, seed, label_range })
    }

    pub fn with_target(mut self, target_index: usize) -> Result<Self> {
        if target_index >= self.y.cols() {
            return dim_err(format!("target {target_index} of {} columns", self.y.cols()));
        }
        self.target_index = target_index;
        Ok(self)
    }

    /// Number of examples.
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    /// Instance dimension.
    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    /// The active target column.
    pub fn target(&self) -> Vec<T> {
        self.y.column(self.target_index)
    }

    pub fn label(&self, row: usize) -> T {
        self.y[(row, self.target_index)]
    }

    /// Rows `0..k` and their active labels.
    pub fn prefix(&self, k: usize) -> Result<(DenseMatrix<T>, Vec<T>)> {
        if k > self.n() {
            return invalid(format!("prefix of {k} examples from a problem with {}", self.n()));
        }
        let y = (0..k).map(|i| self.label(i)).collect();
        Ok((self.x.top_rows(k), y))
    }

    pub fn cast<U: Scalar>(&self) -> Problem<U> {
        Problem {
            x: self.x.cast(),
            y: self.y.cast(),
            target_index: self.target_index,
            family: self.family,
            seed: self.seed,
            label_range: self.label_range,
        }
    }
}

/// Uniform ±1 vector drawn from a seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPattern {
    pub signs: Vec<i8>,
    pub seed: u64,
}

impl SignPattern {
    pub fn draw(n: usize, seed: u64) -> Self {
        let mut r = rng::stream(seed, "sign-pattern", 0);
        let signs = (0..n).map(|_| rng::sign(&mut r) as i8).collect();
        Self { signs, seed }
    }

    pub fn ones(n: usize) -> Self {
        Self { signs: vec![1; n], seed: 0 }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn as_scalars<T: Scalar>(&self) -> Vec<T> {
        self.signs.iter().map(|&s| T::of(s as f64)).collect()
    }
}

/// `(diag(s) H, s)` with `s` uniform from `seed`.
pub fn sign_flip_problem<T: Scalar>(h: &HadamardMatrix, seed: u64) -> Problem<T> {
    sign_flip_with(h, &SignPattern::draw(h.dim(), seed))
}

pub fn sign_flip_with<T: Scalar>(h: &HadamardMatrix, s: &SignPattern) -> Problem<T> {
    let sv = s.as_scalars::<T>();
    let x = h.to_matrix::<T>().scale_rows(&sv).expect("pattern length matches");
    let y = DenseMatrix::column_vector(&sv);
    Problem { x, y, target_index: 0, family: Family::SignFlip, seed: s.seed, label_range: LabelRange::PlusMinusOne }
}

/// `(½(diag(s̃) H̃ + 1), ½(s̃ + 1))` with `s̃` uniform from `seed`.
pub fn complement_problem<T: Scalar>(ht: &StrippedHadamard, seed: u64) -> Problem<T> {
    complement_with(ht, &SignPattern::draw(ht.rows(), seed))
}

pub fn complement_with<T: Scalar>(ht: &StrippedHadamard, s: &SignPattern) -> Problem<T> {
    let half = T::of(0.5);
    let x = DenseMatrix::from_fn(ht.rows(), ht.dim(), |i, j| {
        half * (T::of((s.signs[i] as i32 * ht.row(i)[j]) as f64) + T::one())
    });
    let y: Vec<T> = s.signs.iter().map(|&v| half * (T::of(v as f64) + T::one())).collect();
    Problem {
        x,
        y: DenseMatrix::column_vector(&y),
        target_index: 0,
        family: Family::Complement01,
        seed: s.seed,
        label_range: LabelRange::ZeroOne,
    }
}

/// `(P H, P h)` with `h` the 0-based `column` of `H` and `P` uniform.
pub fn permuted_problem<T: Scalar>(h: &HadamardMatrix, column: usize, seed: u64) -> Result<Problem<T>> {
    let mut r = rng::stream(seed, "permutation", 0);
    let perm = rng::permutation(&mut r, h.dim());
    let mut p = permuted_with(h, column, &perm)?;
    p.seed = seed;
    Ok(p)
}

/// Row `t` of the result is row `perm[t]` of `H`.
pub fn permuted_with<T: Scalar>(h: &HadamardMatrix, column: usize, perm: &[usize]) -> Result<Problem<T>> {
    let d = h.dim();
    if column == 0 {
        return invalid("the first Hadamard column is constant; pick a column in 1..d");
    }
    if column >= d {
        return dim_err(format!("column {column} out of range for d = {d}"));
    }
    if perm.len() != d {
        return dim_err("permutation length");
    }
    let x = h.to_matrix::<T>().select_rows(perm);
    let y = x.column(column);
    Ok(Problem {
        x,
        y: DenseMatrix::column_vector(&y),
        target_index: 0,
        family: Family::Permuted,
        seed: 0,
        label_range: LabelRange::PlusMinusOne,
    })
}

/// `n x d` standard Gaussian instances labelled by the unit vector `w_star`.
/// Row `t` is drawn from its own substream.
pub fn gaussian_problem<T: Scalar>(d: usize, n: usize, w_star: &[f64], seed: u64) -> Result<Problem<T>> {
    if w_star.len() != d {
        return dim_err(format!("w_star has length {} but d = {d}", w_star.len()));
    }
    if (norm(w_star) - 1.0).abs() > 1e-12 {
        return invalid(format!("w_star must have unit norm, got {}", norm(w_star)));
    }
    let mut xf = Vec::with_capacity(n * d);
    for t in 0..n {
        let mut r = rng::stream(seed, "gaussian-row", t as u64);
        xf.extend(rng::normals(&mut r, d));
    }
    let xm = DenseMatrix::from_vec(n, d, xf)?;
    let y = xm.matvec(w_star)?;
    Ok(Problem {
        x: xm.cast(),
        y: DenseMatrix::column_vector(&y).cast(),
        target_index: 0,
        family: Family::GaussianSparse,
        seed,
        label_range: LabelRange::Real,
    })
}

/// `n x d` i.i.d. uniform ±1 instances, target = 0-based `column`.
pub fn random_sign_problem<T: Scalar>(d: usize, n: usize, column: usize, seed: u64) -> Result<Problem<T>> {
    if column >= d {
        return dim_err(format!("column {column} out of range for d = {d}"));
    }
    let x = DenseMatrix::from_vec(
        n,
        d,
        (0..n)
            .flat_map(|t| {
                let mut r = rng::stream(seed, "random-sign-row", t as u64);
                (0..d).map(move |_| T::of(rng::sign(&mut r))).collect::<Vec<_>>()
            })
            .collect(),
    )?;
    let y = x.column(column);
    Ok(Problem {
        x,
        y: DenseMatrix::column_vector(&y),
        target_index: 0,
        family: Family::RandomSign,
        seed,
        label_range: LabelRange::PlusMinusOne,
    })
}

/// `q` copies of `h_i` then `q` copies of `-h_i`, for `i = 0..d`; labels are
/// the first column. With `swap_seed`, each block pair is independently
/// reversed with probability ½.
pub fn duplicated_problem<T: Scalar>(h: &HadamardMatrix, q: usize, swap_seed: Option<u64>) -> Result<Problem<T>> {
    if q == 0 {
        return invalid("duplication factor q must be at least 1");
    }
    let d = h.dim();
    let mut swap_rng = swap_seed.map(|s| rng::stream(s, "block-swap", 0));
    let mut data = Vec::with_capacity(2 * q * d * d);
    for i in 0..d {
        let swapped = swap_rng.as_mut().is_some_and(|r| rng::sign(r) < 0.0);
        let (first, second) = if swapped { (-1, 1) } else { (1, -1) };
        for sign in [first, second] {
            for _ in 0..q {
                data.extend(h.row(i).iter().map(|&v| T::of((sign * v) as f64)));
            }
        }
    }
    let x = DenseMatrix::from_vec(2 * q * d, d, data)?;
    let y = x.column(0);
    Ok(Problem {
        x,
        y: DenseMatrix::column_vector(&y),
        target_index: 0,
        family: Family::Duplicated,
        seed: swap_seed.unwrap_or(0),
        label_range: LabelRange::PlusMinusOne,
    })
}

/// Instances `H`, targets `[H, -H]`, or `([H, -H] + 1) / 2` when shifted.
pub fn doubled_targets<T: Scalar>(h: &HadamardMatrix, shifted: bool) -> Problem<T> {
    let d = h.dim();
    let hm = h.to_matrix::<T>();
    let y = DenseMatrix::from_fn(d, 2 * d, |i, j| {
        let v = if j < d { hm[(i, j)] } else { -hm[(i, j - d)] };
        if shifted {
            (v + T::one()) * T::of(0.5)
        } else {
            v
        }
    });
    let (family, label_range) = if shifted {
        (Family::ShiftedDoubled, LabelRange::ZeroOne)
    } else {
        (Family::DoubledHadamard, LabelRange::PlusMinusOne)
    };
    Problem { x: hm, y, target_index: 0, family, seed: 0, label_range }
}

/// Instance embedding applied row-wise.
#[derive(Clone)]
pub enum FeatureMap<T> {
    Identity,
    /// Odd map `x ↦ sign(x_0) e_1` into `output_dim` dimensions, so every
    /// sign-flipped Hadamard row `s_i h_i` lands on `s_i e_1`.
    ConstantE1 { output_dim: usize },
    Custom { output_dim: usize, map: Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync> },
}

impl<T: Scalar> FeatureMap<T> {
    pub fn custom(output_dim: usize, map: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static) -> Self {
        FeatureMap::Custom { output_dim, map: Arc::new(map) }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        match self {
            FeatureMap::Identity => x.to_vec(),
            FeatureMap::ConstantE1 { output_dim } => {
                let mut out = vec![T::zero(); *output_dim];
                if let (Some(first), Some(&x0)) = (out.first_mut(), x.first()) {
                    *first = if x0 > T::zero() {
                        T::one()
                    } else if x0 < T::zero() {
                        -T::one()
                    } else {
                        T::zero()
                    };
                }
                out
            }
            FeatureMap::Custom { map, .. } => map(x),
        }
    }
}

impl<T> fmt::Debug for FeatureMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureMap::Identity => write!(f, "Identity"),
            FeatureMap::ConstantE1 { output_dim } => write!(f, "ConstantE1({output_dim})"),
            FeatureMap::Custom { output_dim, .. } => write!(f, "Custom({output_dim})"),
        }
    }
}

pub fn apply_feature_map<T: Scalar>(p: &Problem<T>, f: &FeatureMap<T>) -> Result<Problem<T>> {
    let rows: Vec<Vec<T>> = p.x.row_iter().map(|r| f.apply(r)).collect();
    if let FeatureMap::Custom { output_dim, .. } | FeatureMap::ConstantE1 { output_dim } = f {
        if rows.iter().any(|r| r.len() != *output_dim) {
            return dim_err("feature map output has the wrong dimension");
        }
    }
    let x = if rows.is_empty() { DenseMatrix::zeros(0, p.dim()) } else { DenseMatrix::from_rows(&rows)? };
    Ok(Problem { x, ..p.clone() })
}
