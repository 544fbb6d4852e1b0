//! One-hidden-layer network `N(xᵀW, Z)` with a tanh transfer:
//! `ŷ = Σ_j v_j tanh(a_j + β_j) + b₀`, `a = Wᵀx`.

use crate::error::{invalid, Result};
use crate::learners::two_layer::output_weights;
use crate::learners::{guard, Init, LearnerConfig, Predictor};
use crate::linalg::{dot, DenseMatrix};
use crate::problems::Problem;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel<T> {
    /// `d x h`, fully connected input layer
    pub w: DenseMatrix<T>,
    pub v: Vec<T>,
    pub bias: Vec<T>,
    pub out_bias: T,
}

/// Gradients of `½ Σ_t (ŷ_t - y_t)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpGradients<T> {
    pub w: DenseMatrix<T>,
    pub v: Vec<T>,
    pub bias: Vec<T>,
    pub out_bias: T,
}

impl<T: Scalar> MlpModel<T> {
    pub fn init(d: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Self> {
        let h = cfg.hidden_units;
        let w = cfg.init.draw_matrix(d, h, seed)?;
        let v = match cfg.init {
            Init::ReflectiveSign => vec![T::zero(); h],
            _ => output_weights(h, seed),
        };
        Ok(Self { w, v, bias: vec![T::zero(); h], out_bias: T::zero() })
    }

    fn hidden(&self, x: &[T]) -> Vec<T> {
        let a = self.w.t_matvec(x).expect("dimension checked by caller");
        a.iter().zip(&self.bias).map(|(&a, &b)| (a + b).tanh()).collect()
    }

    /// Half square loss summed over the rows of `x`.
    pub fn loss_on(&self, x: &DenseMatrix<T>, y: &[T]) -> T {
        let half = T::of(0.5);
        x.row_iter().zip(y).map(|(r, &y)| {
            let e = self.predict(r) - y;
            half * e * e
        }).sum()
    }

    /// Per example the input-layer gradient is the outer product `x δ_hᵀ`
    /// with `δ_h = δ v ⊙ (1 - tanh²)`.
    pub fn gradients(&self, x: &DenseMatrix<T>, y: &[T]) -> Result<MlpGradients<T>> {
        if x.rows() != y.len() || x.cols() != self.w.rows() {
            return invalid("gradient batch does not match the network");
        }
        let h = self.v.len();
        let mut g = MlpGradients {
            w: DenseMatrix::zeros(self.w.rows(), h),
            v: vec![T::zero(); h],
            bias: vec![T::zero(); h],
            out_bias: T::zero(),
        };
        for (row, &yt) in x.row_iter().zip(y) {
            let z = self.hidden(row);
            let delta = dot(&self.v, &z) + self.out_bias - yt;
            g.out_bias = g.out_bias + delta;
            for j in 0..h {
                g.v[j] = g.v[j] + delta * z[j];
                let dh = delta * self.v[j] * (T::one() - z[j] * z[j]);
                g.bias[j] = g.bias[j] + dh;
                for (i, &xi) in row.iter().enumerate() {
                    let cur = g.w[(i, j)];
                    g.w.row_mut(i)[j] = cur + xi * dh;
                }
            }
        }
        Ok(g)
    }

    /// `cfg.epochs` full-batch steps on rows `0..k`.
    pub fn fit(&mut self, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>) -> Result<()> {
        if k > p.n() {
            return invalid(format!("k = {k} exceeds the {} available examples", p.n()));
        }
        if p.dim() != self.w.rows() {
            return invalid("problem dimension does not match the network");
        }
        if k == 0 {
            return Ok(());
        }
        let (x, y) = p.prefix(k)?;
        let eta = cfg.eta;
        for step in 0..cfg.epochs {
            let g = self.gradients(&x, &y)?;
            for (w, gw) in self.w.as_mut_slice().iter_mut().zip(g.w.as_slice()) {
                *w = *w - eta * *gw;
            }
            for j in 0..self.v.len() {
                self.v[j] = self.v[j] - eta * g.v[j];
                self.bias[j] = self.bias[j] - eta * g.bias[j];
            }
            self.out_bias = self.out_bias - eta * g.out_bias;
            guard(self.w.as_slice(), step, "W")?;
            guard(&self.v, step, "v")?;
            guard(&self.bias, step, "bias")?;
            guard(&[self.out_bias], step, "out_bias")?;
        }
        Ok(())
    }
}

impl<T: Scalar> Predictor<T> for MlpModel<T> {
    fn input_dim(&self) -> usize {
        self.w.rows()
    }

    fn predict(&self, x: &[T]) -> T {
        dot(&self.v, &self.hidden(x)) + self.out_bias
    }
}

pub fn train_mlp<T: Scalar>(p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<MlpModel<T>> {
    cfg.validate()?;
    let mut m = MlpModel::init(p.dim(), cfg, seed)?;
    m.fit(p, k, cfg)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::sylvester;
    use crate::problems::sign_flip_problem;

    #[test]
    fn zero_network_predicts_zero() {
        let m = MlpModel { w: DenseMatrix::<f64>::zeros(4, 3), v: vec![0.0; 3], bias: vec![0.0; 3], out_bias: 0.0 };
        assert_eq!(m.predict(&[1.0, -1.0, 1.0, 1.0]), 0.0);
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(3).unwrap(), 5);
        let cfg = LearnerConfig::new(0.1, Init::gaussian(8)).hidden(6);
        let m = MlpModel::init(8, &cfg, 4).unwrap();
        let (x, y) = p.prefix(5).unwrap();
        let g = m.gradients(&x, &y).unwrap();
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            for j in 0..6 {
                let mut plus = m.clone();
                plus.w.row_mut(i)[j] += h;
                let mut minus = m.clone();
                minus.w.row_mut(i)[j] -= h;
                let fd = (plus.loss_on(&x, &y) - minus.loss_on(&x, &y)) / (2.0 * h);
                worst = worst.max((fd - g.w[(i, j)]).abs());
            }
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn training_reduces_loss() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(3).unwrap(), 5);
        let cfg = LearnerConfig::new(0.05, Init::gaussian(8)).hidden(8).epochs(100);
        let m0 = MlpModel::init(8, &cfg, 1).unwrap();
        let m = train_mlp(&p, 4, &cfg, 1).unwrap();
        let (x, y) = p.prefix(4).unwrap();
        assert!(m.loss_on(&x, &y) < m0.loss_on(&x, &y));
    }
}
