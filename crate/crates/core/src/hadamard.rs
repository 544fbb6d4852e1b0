//! Sylvester–Hadamard matrices and the bit-pattern expansion ψ.
//!
//! Construction and orthogonality checks run on `i32` entries so they are
//! exact; conversion to a floating [`DenseMatrix`] happens on request.
//!
//! Entry `(r, c)` of the Sylvester matrix of dimension `2^q` is
//! `(-1)^popcount(r & c)`. Reading the row index `r` as a bit pattern with
//! `b_i = -1` iff bit `i` of `r` is set, and the column index `c` as the subset
//! `{i : bit i of c set}`, the row is exactly the vector of subset products of
//! `b`, which is ψ(b).

use crate::error::{dim_err, Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Largest supported Sylvester order (`d = 4096`).
pub const MAX_ORDER: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardMatrix {
    order: u32,
    entries: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrippedHadamard {
    dim: usize,
    entries: Vec<i32>,
}

/// A ±1 pattern of length `log2 d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitPattern(Vec<i8>);

impl BitPattern {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::Invalid("bit pattern entries must be +1 or -1".into()));
        }
        Ok(Self(bits))
    }

    /// Pattern number `index` among the `2^len` patterns; bit `i` of `index`
    /// set means `b_i = -1`. Enumerating `0..2^len` gives the rows of the
    /// bit-pattern display in Sylvester order.
    pub fn from_index(index: usize, len: usize) -> Self {
        Self((0..len).map(|i| if (index >> i) & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.0
    }
}

/// Sylvester construction of `H` with `d = 2^order`.
pub fn sylvester(order: u32) -> Result<HadamardMatrix> {
    sylvester_capped(order, MAX_ORDER)
}

pub fn sylvester_capped(order: u32, max_order: u32) -> Result<HadamardMatrix> {
    if order > max_order {
        return Err(Error::Capacity {
            what: format!("Hadamard order {order} (d = 2^{order})"),
            limit: 1usize << max_order,
        });
    }
    let mut entries = vec![1i32];
    let mut n = 1usize;
    for _ in 0..order {
        let m = 2 * n;
        let mut next = vec![0i32; m * m];
        for i in 0..n {
            for j in 0..n {
                let h = entries[i * n + j];
                next[i * m + j] = h;
                next[i * m + j + n] = h;
                next[(i + n) * m + j] = h;
                next[(i + n) * m + j + n] = -h;
            }
        }
        entries = next;
        n = m;
    }
    Ok(HadamardMatrix { order, entries })
}

impl HadamardMatrix {
    /// Hadamard matrix of dimension `d`, which must be a power of two.
    pub fn of_dim(d: usize) -> Result<Self> {
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::Invalid(format!("Hadamard dimension {d} is not a power of two")));
        }
        sylvester(d.trailing_zeros())
    }

    pub fn dim(&self) -> usize {
        1 << self.order
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn entry(&self, i: usize, j: usize) -> i32 {
        self.entries[i * self.dim() + j]
    }

    pub fn row(&self, i: usize) -> &[i32] {
        let d = self.dim();
        &self.entries[i * d..(i + 1) * d]
    }

    pub fn to_matrix<T: Scalar>(&self) -> DenseMatrix<T> {
        let d = self.dim();
        DenseMatrix::from_fn(d, d, |i, j| T::of(self.entry(i, j) as f64))
    }

    /// `H Hᵀ` in exact integer arithmetic.
    pub fn gram(&self) -> Vec<i64> {
        gram_i32(&self.entries, self.dim(), self.dim())
    }

    /// Checks `H Hᵀ = d I`, the all-ones first row and column, and the
    /// power-of-two dimension, exactly.
    pub fn is_valid(&self) -> bool {
        let d = self.dim();
        let g = self.gram();
        let orth = (0..d).all(|i| (0..d).all(|j| g[i * d + j] == if i == j { d as i64 } else { 0 }));
        let ones = (0..d).all(|i| self.entry(0, i) == 1 && self.entry(i, 0) == 1);
        orth && ones && self.entries.iter().all(|&x| x == 1 || x == -1)
    }
}

fn gram_i32(e: &[i32], rows: usize, cols: usize) -> Vec<i64> {
    let mut g = vec![0i64; rows * rows];
    for i in 0..rows {
        for j in i..rows {
            let v: i64 = (0..cols).map(|c| (e[i * cols + c] * e[j * cols + c]) as i64).sum();
            g[i * rows + j] = v;
            g[j * rows + i] = v;
        }
    }
    g
}

/// `H` with its all-ones first row removed, `(d-1) x d`.
pub fn strip_first_row(h: &HadamardMatrix) -> StrippedHadamard {
    let d = h.dim();
    StrippedHadamard { dim: d, entries: h.entries[d..].to_vec() }
}

impl StrippedHadamard {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.dim - 1
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.rows()).map(|i| self.row(i).iter().map(|&x| x as i64).sum()).collect()
    }

    pub fn to_matrix<T: Scalar>(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.rows(), self.dim, |i, j| T::of(self.row(i)[j] as f64))
    }
}

/// ψ(b): all `2^|b|` subset products, column `c` holding `∏_{i ∈ c} b_i`.
pub fn psi_expand_int(b: &BitPattern) -> Vec<i32> {
    let d = 1usize << b.len();
    let mut out = vec![1i32; d];
    // doubling: out[c | 2^i] = out[c] * b_i
    for (i, &bi) in b.bits().iter().enumerate() {
        let half = 1usize << i;
        for c in 0..half {
            out[c + half] = out[c] * bi as i32;
        }
    }
    out
}

pub fn psi_expand<T: Scalar>(b: &BitPattern) -> Vec<T> {
    psi_expand_int(b).into_iter().map(|x| T::of(x as f64)).collect()
}

/// `∏ (1 + b_i b2_i)`, which equals `ψ(b) · ψ(b2)` in `O(log d)`.
pub fn kernel_dot(b: &BitPattern, b2: &BitPattern) -> Result<i64> {
    if b.len() != b2.len() {
        return dim_err(format!("bit patterns of length {} and {}", b.len(), b2.len()));
    }
    Ok(b.bits().iter().zip(b2.bits()).map(|(&x, &y)| 1 + (x as i64) * (y as i64)).product())
}

/// The `d x log2 d` matrix whose rows are all bit patterns in Sylvester order.
pub fn bit_pattern_matrix<T: Scalar>(order: u32) -> DenseMatrix<T> {
    let d = 1usize << order;
    let len = order as usize;
    DenseMatrix::from_fn(d, len, |r, i| T::of(BitPattern::from_index(r, len).bits()[i] as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        assert_eq!(sylvester(0).unwrap().entries, vec![1]);
        assert_eq!(sylvester(1).unwrap().entries, vec![1, 1, 1, -1]);
        let h4 = sylvester(2).unwrap();
        // recursion applied by hand
        let expect = [1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1];
        assert_eq!(h4.entries, expect);
        assert!(h4.is_valid());
        let g = h4.gram();
        assert_eq!(g, vec![4, 0, 0, 0, 0, 4, 0, 0, 0, 0, 4, 0, 0, 0, 0, 4]);
    }

    #[test]
    fn entry_formula() {
        let h = sylvester(5).unwrap();
        for r in 0..32usize {
            for c in 0..32 {
                let expect = if (r & c).count_ones().is_multiple_of(2) { 1 } else { -1 };
                assert_eq!(h.entry(r, c), expect);
            }
        }
    }

    #[test]
    fn capacity_cap() {
        assert!(matches!(sylvester(MAX_ORDER + 1), Err(Error::Capacity { .. })));
        assert!(sylvester_capped(3, 2).is_err());
        assert!(HadamardMatrix::of_dim(12).is_err());
        assert_eq!(HadamardMatrix::of_dim(16).unwrap().order(), 4);
    }

    #[test]
    fn stripped_rows_balance() {
        let t = strip_first_row(&sylvester(1).unwrap());
        assert_eq!(t.row(0), &[1, -1]);
        let t4 = strip_first_row(&sylvester(2).unwrap());
        assert_eq!(t4.rows(), 3);
        for i in 0..3 {
            assert_eq!(t4.row(i).iter().filter(|&&x| x == 1).count(), 2);
        }
        let t16 = strip_first_row(&sylvester(4).unwrap());
        assert!(t16.row_sums().iter().all(|&s| s == 0));
    }

    #[test]
    fn psi_matches_display_for_three_bits() {
        // bit-pattern and expanded-row display for log d = 3, '+' = 1
        let patterns = ["+++", "-++", "+-+", "--+", "++-", "-+-", "+--", "---"];
        let rows = [
            "++++++++", "+-+-+-+-", "++--++--", "+--++--+", "++++----", "+-+--+-+", "++----++",
            "+--+-++-",
        ];
        let parse = |s: &str| -> Vec<i32> { s.chars().map(|c| if c == '+' { 1 } else { -1 }).collect() };
        for (r, (p, row)) in patterns.iter().zip(rows).enumerate() {
            let b = BitPattern::from_index(r, 3);
            let pb: Vec<i32> = b.bits().iter().map(|&x| x as i32).collect();
            assert_eq!(pb, parse(p));
            assert_eq!(psi_expand_int(&b), parse(row));
        }
    }

    #[test]
    fn psi_all_plus_is_ones() {
        let b = BitPattern::new(vec![1; 5]).unwrap();
        assert!(psi_expand::<f64>(&b).iter().all(|&x| x == 1.0));
        assert!(BitPattern::new(vec![1, 0]).is_err());
    }

    #[test]
    fn kernel_examples() {
        let b = BitPattern::from_index(5, 4);
        assert_eq!(kernel_dot(&b, &b).unwrap(), 16);
        let b2 = BitPattern::from_index(5 ^ 2, 4);
        assert_eq!(kernel_dot(&b, &b2).unwrap(), 0);
        assert!(kernel_dot(&b, &BitPattern::from_index(0, 3)).is_err());
    }

    #[test]
    fn distinct_patterns_expand_orthogonally() {
        // brute force over all pairs at log d = 3
        for i in 0..8 {
            for j in 0..8 {
                let (a, b) = (BitPattern::from_index(i, 3), BitPattern::from_index(j, 3));
                let dot: i32 = psi_expand_int(&a).iter().zip(psi_expand_int(&b)).map(|(x, y)| x * y).sum();
                assert_eq!(dot, if i == j { 8 } else { 0 });
            }
        }
    }
}
