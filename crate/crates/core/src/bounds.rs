//! Closed-form lower-bound curves, spectral certificates and the
//! Monte-Carlo simulations of the optimal predictors behind them.
//!
//! `k` is always the number of training examples seen. Curves are tabulated
//! for `k = 0..=n`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, invalid, Error, Result};
use crate::hadamard::{strip_first_row, HadamardMatrix};
use crate::linalg::{numerical_rank, orthonormal_basis, squared_singular_values, symmetric_eigenvalues, DenseMatrix, RANK_RTOL};
use crate::problems::{complement_problem, sign_flip_problem};
use crate::rng;
use crate::scalar::Scalar;
use crate::stats::{variance_summary, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    SignFlip,
    Complement01,
    Permute,
    Gaussian,
    SawTooth(usize),
    IidCoupon,
    SvdTail,
    SvdTailInit,
    ShiftedDoubled,
    TwoLayerRank,
}

impl Theorem {
    pub fn tag(&self) -> String {
        match self {
            Theorem::SignFlip => "sign-flip".into(),
            Theorem::Complement01 => "complement".into(),
            Theorem::Permute => "permute".into(),
            Theorem::Gaussian => "gaussian".into(),
            Theorem::SawTooth(q) => format!("sawtooth-q{q}"),
            Theorem::IidCoupon => "iid".into(),
            Theorem::SvdTail => "svd-tail".into(),
            Theorem::SvdTailInit => "svd-tail-init".into(),
            Theorem::ShiftedDoubled => "shifted-doubled".into(),
            Theorem::TwoLayerRank => "two-layer-rank".into(),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub theorem: Theorem,
    /// `values[k]` for `k = 0..=n`
    pub values: Vec<f64>,
}

impl BoundCurve {
    pub fn tabulate(theorem: Theorem, n: usize, f: impl Fn(usize) -> Result<f64>) -> Result<Self> {
        Ok(Self { theorem, values: (0..=n).map(f).collect::<Result<_>>()? })
    }

    pub fn value(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Curve for a problem family with `d` features, over all its examples.
    pub fn for_theorem(theorem: Theorem, d: usize) -> Result<Self> {
        match theorem {
            Theorem::SignFlip => Self::tabulate(theorem, d, |k| curve_sign_flip(d, k)),
            Theorem::Complement01 => Self::tabulate(theorem, d - 1, |k| curve_complement(d, k)),
            Theorem::Permute => Self::tabulate(theorem, d, |k| curve_permute(d, k.min(d - 1))),
            Theorem::Gaussian => Self::tabulate(theorem, d, |k| curve_gaussian(d, k)),
            Theorem::SawTooth(q) => Self::tabulate(theorem, 2 * q * d, |k| curve_sawtooth(d, q, k)),
            Theorem::IidCoupon => Self::tabulate(theorem, d, |k| curve_iid(d, k)),
            Theorem::ShiftedDoubled => Self::tabulate(theorem, d, |k| Ok(curve_shifted_doubled(d, k).max(0.0))),
            Theorem::SvdTail | Theorem::SvdTailInit | Theorem::TwoLayerRank => {
                invalid(format!("the {theorem} curve depends on a target matrix; use BoundCurve::spectral"))
            }
        }
    }

    /// Spectral curves of a target matrix `y`: rank budget `k` (SvdTail),
    /// `k + 1` (SvdTailInit) or `2k + 1` (TwoLayerRank).
    pub fn spectral<T: Scalar>(theorem: Theorem, y: &DenseMatrix<T>) -> Result<Self> {
        let spec = Spectrum::of(y)?;
        let budget = |k: usize| match theorem {
            Theorem::SvdTail => Ok(k),
            Theorem::SvdTailInit => Ok(k + 1),
            Theorem::TwoLayerRank => Ok(2 * k + 1),
            other => invalid(format!("{other} is not a spectral curve")),
        };
        Self::tabulate(theorem, y.rows(), |k| Ok(spec.tail_fraction(budget(k)?)))
    }
}

fn check_k(k: usize, max: usize) -> Result<()> {
    if k > max {
        return invalid(format!("k = {k} exceeds {max}"));
    }
    Ok(())
}

pub fn curve_sign_flip(d: usize, k: usize) -> Result<f64> {
    check_k(k, d)?;
    Ok(1.0 - k as f64 / d as f64)
}

pub fn curve_complement(d: usize, k: usize) -> Result<f64> {
    if d < 2 {
        return invalid("complement curve needs d ≥ 2");
    }
    check_k(k, d - 1)?;
    Ok(0.25 * (1.0 - k as f64 / (d - 1) as f64))
}

pub fn curve_permute(d: usize, k: usize) -> Result<f64> {
    if d < 2 {
        return invalid("permute curve needs d ≥ 2");
    }
    check_k(k, d - 1)?;
    Ok(1.0 - k as f64 / (d - 1) as f64)
}

pub fn curve_gaussian(d: usize, k: usize) -> Result<f64> {
    check_k(k, d)?;
    let r = 1.0 - k as f64 / d as f64;
    Ok(r * r)
}

/// `1 - 2q⌈k/2q⌉ / (2qd)` for the `q`-fold duplicated problem.
pub fn curve_sawtooth(d: usize, q: usize, k: usize) -> Result<f64> {
    if q == 0 {
        return invalid("q must be at least 1");
    }
    let m = 2 * q;
    check_k(k, m * d)?;
    Ok(1.0 - (m * k.div_ceil(m)) as f64 / (m * d) as f64)
}

/// Expected fraction of `d` items never drawn in `k` uniform draws.
pub fn curve_iid(d: usize, k: usize) -> Result<f64> {
    if d == 0 {
        return invalid("d must be positive");
    }
    Ok((1.0 - 1.0 / d as f64).powi(k as i32))
}

/// `¼ - (k+1)/(4d)`, the shifted doubled Hadamard curve.
pub fn curve_shifted_doubled(d: usize, k: usize) -> f64 {
    0.25 - (k + 1) as f64 / (4.0 * d as f64)
}

/// Squared singular values of a matrix, non-increasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub squared_singular_values: Vec<f64>,
    pub frobenius_sq: f64,
}

impl Spectrum {
    pub fn of<T: Scalar>(y: &DenseMatrix<T>) -> Result<Self> {
        if y.is_empty() {
            return invalid("spectrum of an empty matrix");
        }
        let s: Vec<f64> = squared_singular_values(y)?.into_iter().map(|v| v.f64()).collect();
        Ok(Self { squared_singular_values: s, frobenius_sq: y.frobenius_sq().f64() })
    }

    /// Rank at relative tolerance `1e-10 · s_max` on singular values.
    pub fn rank(&self) -> usize {
        let s: Vec<f64> = self.squared_singular_values.iter().map(|v| v.max(0.0).sqrt()).collect();
        numerical_rank(&s, RANK_RTOL)
    }

    /// `Σ_{i > r} s_i² / ‖Y‖_F²` over the numerically nonzero values; 0 once
    /// `r` reaches the rank.
    pub fn tail_fraction(&self, r: usize) -> f64 {
        self.tail_mass(r) / self.frobenius_sq
    }

    /// `Σ_{i > r} s_i²` over the numerically nonzero values.
    pub fn tail_mass(&self, r: usize) -> f64 {
        let rank = self.rank();
        if r >= rank {
            return 0.0;
        }
        self.squared_singular_values[r..rank].iter().sum()
    }

    pub fn sum(&self) -> f64 {
        self.squared_singular_values.iter().sum()
    }
}

/// Loss floor for learners whose combined weights have rank at most `k`.
pub fn svd_tail_bound<T: Scalar>(y: &DenseMatrix<T>, k: usize) -> Result<f64> {
    Ok(Spectrum::of(y)?.tail_fraction(k))
}

/// As [`svd_tail_bound`] with rank budget `k + 1`, for arbitrary
/// initialization.
pub fn svd_tail_bound_with_init<T: Scalar>(y: &DenseMatrix<T>, k: usize) -> Result<f64> {
    Ok(Spectrum::of(y)?.tail_fraction(k + 1))
}

/// Loss floor for `m` targets over `n` examples when the combined weights
/// have rank at most `r`: `Σ_{i > r} s_i² / (n m)`. Equals the
/// Frobenius-normalized tail for ±1 targets; for 0/1 targets it is the
/// per-entry average.
pub fn entry_normalized_tail<T: Scalar>(y: &DenseMatrix<T>, r: usize) -> Result<f64> {
    let spec = Spectrum::of(y)?;
    Ok(spec.tail_mass(r) / (y.rows() * y.cols()) as f64)
}

/// Closed-form spectrum of `([H, -H] + 1)/2`:
/// `[d²/2 + d/2, d/2, …, d/2]`.
pub fn shifted_doubled_spectrum(d: usize) -> Result<Spectrum> {
    if !d.is_power_of_two() {
        return invalid(format!("d = {d} is not a Hadamard dimension"));
    }
    let df = d as f64;
    let mut s = vec![df / 2.0; d];
    s[0] = df * df / 2.0 + df / 2.0;
    Ok(Spectrum { squared_singular_values: s, frobenius_sq: df * df })
}

/// Label count statistics on the unseen part of a uniformly permuted
/// balanced ±1 label vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypergeometric {
    /// Expected total square loss over the `d - k` unseen examples of the
    /// predictor that outputs the mean of the unseen labels.
    pub total_loss: f64,
    /// Expected number of `+1` labels among the unseen.
    pub mean_q: f64,
    pub var_q: f64,
}

pub fn hypergeometric_unseen_loss(d: usize, k: usize) -> Result<Hypergeometric> {
    if d < 2 || !d.is_multiple_of(2) {
        return invalid(format!("d = {d} must be even and at least 2"));
    }
    check_k(k, d)?;
    let (df, kf) = (d as f64, k as f64);
    Ok(Hypergeometric {
        // the closed form is exact for k ≤ d-1; nothing is unseen at k = d
        total_loss: if k == d { 0.0 } else { df - kf * df / (df - 1.0) },
        mean_q: (df - kf) / 2.0,
        var_q: (df - kf) * kf / (4.0 * (df - 1.0)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricEstimate {
    pub total_loss: Summary,
    pub mean_q: Summary,
    pub var_q: Summary,
    /// Average loss over all `d` rows (seen rows cost nothing).
    pub average_loss: Summary,
}

/// Simulate the optimal predictor on the unseen part of `trials` random
/// permutations of a balanced label vector.
pub fn simulate_hypergeometric(d: usize, k: usize, trials: usize, seed: u64) -> Result<HypergeometricEstimate> {
    hypergeometric_unseen_loss(d, k)?;
    if trials < 2 {
        return invalid("need at least 2 trials");
    }
    let labels: Vec<i32> = (0..d).map(|i| if i < d / 2 { 1 } else { -1 }).collect();
    let draws: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let perm = rng::permutation(&mut rng::stream(seed, "hypergeometric", t as u64), d);
            let q = perm[k..].iter().filter(|&&i| labels[i] > 0).count() as f64;
            let m = (d - k) as f64;
            // predicting the unseen mean (2q - m)/m costs m(1 - mean²)
            let loss = if m > 0.0 {
                let mean = (2.0 * q - m) / m;
                m * (1.0 - mean * mean)
            } else {
                0.0
            };
            (q, loss)
        })
        .collect();
    let qs: Vec<f64> = draws.iter().map(|p| p.0).collect();
    let losses: Vec<f64> = draws.iter().map(|p| p.1).collect();
    let avg: Vec<f64> = losses.iter().map(|l| l / d as f64).collect();
    Ok(HypergeometricEstimate {
        total_loss: Summary::of(&losses),
        mean_q: Summary::of(&qs),
        var_q: variance_summary(&qs),
        average_loss: Summary::of(&avg),
    })
}

/// Average loss over all rows of the optimal predictor for the sign-flip
/// (predict 0 on unseen rows) or complement (predict ½) problem, over
/// `trials` random sign patterns. Seen rows are predicted exactly.
pub fn simulate_constant_predictor(h: &HadamardMatrix, complement: bool, k: usize, trials: usize, seed: u64) -> Result<Summary> {
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = rng::derive_seed(seed, "constant-predictor", t as u64);
            let (y, c) = if complement {
                (complement_problem::<f64>(&strip_first_row(h), s).target(), 0.5)
            } else {
                (sign_flip_problem::<f64>(h, s).target(), 0.0)
            };
            if k > y.len() {
                return Err(Error::Invalid(format!("k = {k} exceeds {} rows", y.len())));
            }
            Ok(y[k..].iter().map(|v| (v - c) * (v - c)).sum::<f64>() / y.len() as f64)
        })
        .collect::<Result<_>>()?;
    Ok(Summary::of(&samples))
}

/// Fraction of the `d` items never drawn after `k` uniform i.i.d. draws, for
/// each `k = 0..=k_max`, over `trials` independent draw sequences.
pub fn simulate_coupon(d: usize, k_max: usize, trials: usize, seed: u64) -> Vec<Summary> {
    use rand::Rng;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, "coupon", t as u64);
            let mut seen = vec![false; d];
            let mut missing = d;
            let mut out = Vec::with_capacity(k_max + 1);
            out.push(1.0);
            for _ in 0..k_max {
                let i = r.gen_range(0..d);
                if !seen[i] {
                    seen[i] = true;
                    missing -= 1;
                }
                out.push(missing as f64 / d as f64);
            }
            out
        })
        .collect();
    (0..=k_max)
        .map(|k| Summary::of(&per_trial.iter().map(|v| v[k]).collect::<Vec<_>>()))
        .collect()
}

/// Orthonormal basis of the span of
/// `[W1₀ w2₀, W1₀ W1₀ᵀ X_trᵀ, X_trᵀ]`, as columns.
pub fn two_layer_span_basis<T: Scalar>(w10: &DenseMatrix<T>, w20: &[T], xtr: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let d = w10.rows();
    if xtr.cols() != d && xtr.rows() > 0 {
        return dim_err(format!("X_tr has {} columns, W1₀ has {d} rows", xtr.cols()));
    }
    let first = DenseMatrix::column_vector(&w10.matvec(w20)?);
    let xt = if xtr.rows() == 0 { DenseMatrix::zeros(d, 0) } else { xtr.transpose() };
    let mid = w10.matmul(&w10.transpose())?.matmul(&xt)?;
    let gen = first.hcat(&mid)?.hcat(&xt)?;
    orthonormal_basis(&gen, RANK_RTOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    /// Expected loss of one unseen coordinate, `½((√d t - 1)² + (√d t + 1)²)`.
    pub pair_term: f64,
    /// Average loss over all `d` rows.
    pub average_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub argmin_t: f64,
}

/// Exact loss of the rotated sign-flip problem `(√d I, s)` when every unseen
/// coordinate of the initial weight is set to `t`; seen rows are fit exactly.
pub fn zero_init_optimality_sweep(d: usize, k: usize, grid: &[f64]) -> Result<SweepTable> {
    check_k(k, d)?;
    if grid.is_empty() {
        return invalid("empty grid");
    }
    let sd = (d as f64).sqrt();
    let rows: Vec<SweepRow> = grid
        .iter()
        .map(|&t| {
            let pair = 0.5 * ((sd * t - 1.0).powi(2) + (sd * t + 1.0).powi(2));
            SweepRow { t, pair_term: pair, average_loss: (d - k) as f64 * pair / d as f64 }
        })
        .collect();
    let argmin_t = rows
        .iter()
        .min_by(|a, b| a.average_loss.total_cmp(&b.average_loss).then(a.t.abs().total_cmp(&b.t.abs())))
        .map(|r| r.t)
        .unwrap_or(0.0);
    Ok(SweepTable { rows, argmin_t })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub d: usize,
    pub k: usize,
    /// `Σ_{i>k} s_i² / d²` per trial
    pub tail_fractions: Vec<f64>,
    /// `s_1²` per trial
    pub top: Vec<f64>,
    /// `max_trial |Σ s_i² - d²| / d²`
    pub frobenius_rel_err: f64,
    /// `Σ_{i>k} s_i² ≥ d² - k s_1²` on every trial
    pub deterministic_holds: bool,
    /// Estimate of `E[s_1] / √d`
    pub c_hat: f64,
    /// `(t, fraction of trials with tail ≥ 1 - (ĉ + t/√d)² k/d)`
    pub exceedance: Vec<(f64, f64)>,
}

/// Spectra of `trials` uniform random ±1 `d x d` matrices.
pub fn spectrum_concentration(d: usize, k: usize, trials: usize, t_grid: &[f64], seed: u64) -> Result<ConcentrationReport> {
    check_k(k, d)?;
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    let spectra: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, "random-sign-matrix", t as u64);
            let m = DenseMatrix::from_fn(d, d, |_, _| rng::sign(&mut r));
            symmetric_eigenvalues(&m.gram_rows())
        })
        .collect::<Result<_>>()?;
    let d2 = (d * d) as f64;
    let mut frob: f64 = 0.0;
    let mut ok = true;
    let mut tails = Vec::with_capacity(trials);
    let mut top = Vec::with_capacity(trials);
    for s in &spectra {
        let s: Vec<f64> = s.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = s.iter().sum();
        frob = frob.max((total - d2).abs() / d2);
        let tail: f64 = s[k..].iter().sum();
        if tail < d2 - k as f64 * s[0] - 1e-9 * d2 {
            ok = false;
        }
        tails.push(tail / d2);
        top.push(s[0]);
    }
    let c_hat = top.iter().map(|s| s.sqrt()).sum::<f64>() / trials as f64 / (d as f64).sqrt();
    let exceedance = t_grid
        .iter()
        .map(|&t| {
            let c = c_hat + t / (d as f64).sqrt();
            let floor = 1.0 - c * c * k as f64 / d as f64;
            (t, tails.iter().filter(|&&v| v >= floor).count() as f64 / trials as f64)
        })
        .collect();
    Ok(ConcentrationReport { d, k, tail_fractions: tails, top, frobenius_rel_err: frob, deterministic_holds: ok, c_hat, exceedance })
}
