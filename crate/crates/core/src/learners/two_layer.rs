//! Fully connected two-layer linear network `ŷ = xᵀ W1 w2`, trained by
//! full-batch gradient descent on the training prefix.
//!
//! Alongside the weights the model carries the coefficients `(A, a, c, b)` of
//! the closed form
//!
//! ```text
//! W1 = W1₀ + X_trᵀ (A X_tr W1₀ + a w2₀ᵀ)
//! w2 = c w2₀ + W1₀ᵀ X_trᵀ b
//! ```
//!
//! updated by their own recurrences, so the form can be checked against the
//! directly updated weights after every step.

use crate::error::{invalid, Result};
use crate::learners::{guard, Init, LearnerConfig, Predictor};
use crate::linalg::{dot, DenseMatrix};
use crate::problems::Problem;
use crate::rng;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoLayerCoefficients<T> {
    /// `k x k`
    pub a_mat: DenseMatrix<T>,
    pub a_vec: Vec<T>,
    pub c: T,
    pub b: Vec<T>,
}

impl<T: Scalar> TwoLayerCoefficients<T> {
    fn start(k: usize) -> Self {
        Self { a_mat: DenseMatrix::zeros(k, k), a_vec: vec![T::zero(); k], c: T::one(), b: vec![T::zero(); k] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoLayerModel<T> {
    /// `d x h`
    pub w1: DenseMatrix<T>,
    pub w2: Vec<T>,
    pub w1_init: DenseMatrix<T>,
    pub w2_init: Vec<T>,
    /// Training prefix of the last fit.
    pub xtr: Option<DenseMatrix<T>>,
    pub coeffs: Option<TwoLayerCoefficients<T>>,
}

impl<T: Scalar> TwoLayerModel<T> {
    pub fn from_init(w1: DenseMatrix<T>, w2: Vec<T>) -> Result<Self> {
        if w1.cols() != w2.len() {
            return invalid(format!("W1 has {} columns but w2 has length {}", w1.cols(), w2.len()));
        }
        Ok(Self { w1_init: w1.clone(), w2_init: w2.clone(), w1, w2, xtr: None, coeffs: None })
    }

    /// `W1` from `cfg.init`; `w2 ~ N(0, 1/h)`, except that the reflective
    /// sign init starts the upper layer at zero.
    pub fn init(d: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Self> {
        let h = cfg.hidden_units;
        let w1 = cfg.init.draw_matrix(d, h, seed)?;
        let w2 = match cfg.init {
            Init::ReflectiveSign => vec![T::zero(); h],
            _ => output_weights(h, seed),
        };
        Self::from_init(w1, w2)
    }

    pub fn hidden(&self) -> usize {
        self.w2.len()
    }

    /// `W1 w2`, the linear weight the network computes.
    pub fn combined_weight(&self) -> Vec<T> {
        self.w1.matvec(&self.w2).expect("shapes checked at construction")
    }

    /// `cfg.epochs` simultaneous full-batch steps on rows `0..k`.
    pub fn fit(&mut self, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>) -> Result<()> {
        if k > p.n() {
            return invalid(format!("k = {k} exceeds the {} available examples", p.n()));
        }
        if p.dim() != self.w1.rows() {
            return invalid("problem dimension does not match the network");
        }
        let (x, y) = p.prefix(k)?;
        // restart the closed form from the current weights
        self.w1_init = self.w1.clone();
        self.w2_init = self.w2.clone();
        let gram = x.gram_rows();
        let mut co = TwoLayerCoefficients::start(k);
        let eta = cfg.eta;
        for step in 0..cfg.epochs {
            let pred = x.matvec(&self.combined_weight())?;
            let delta: Vec<T> = pred.iter().zip(&y).map(|(&a, &b)| a - b).collect();
            let xd = x.t_matvec(&delta)?; // X_trᵀ δ, length d
            let g2 = self.w1.t_matvec(&xd)?; // W1ᵀ X_trᵀ δ
            for i in 0..self.w1.rows() {
                let row = self.w1.row_mut(i);
                for (wij, &w2j) in row.iter_mut().zip(&self.w2) {
                    *wij = *wij - eta * xd[i] * w2j;
                }
            }
            for (w, g) in self.w2.iter_mut().zip(&g2) {
                *w = *w - eta * *g;
            }
            guard(self.w1.as_slice(), step, "W1")?;
            guard(&self.w2, step, "w2")?;

            let gd = gram.matvec(&delta)?;
            let agd = co.a_mat.t_matvec(&gd)?;
            let dc = dot(&co.a_vec, &gd);
            for i in 0..k {
                for j in 0..k {
                    let v = co.a_mat[(i, j)] - eta * delta[i] * co.b[j];
                    co.a_mat.row_mut(i)[j] = v;
                }
            }
            for i in 0..k {
                co.a_vec[i] = co.a_vec[i] - eta * co.c * delta[i];
                co.b[i] = co.b[i] - eta * (delta[i] + agd[i]);
            }
            co.c = co.c - eta * dc;
        }
        self.xtr = Some(x);
        self.coeffs = Some(co);
        Ok(())
    }

    /// Weights rebuilt from the tracked coefficients.
    pub fn closed_form(&self) -> Option<(DenseMatrix<T>, Vec<T>)> {
        let (x, co) = (self.xtr.as_ref()?, self.coeffs.as_ref()?);
        let inner = co.a_mat.matmul(&x.matmul(&self.w1_init).ok()?).ok()?;
        let outer = DenseMatrix::from_fn(inner.rows(), inner.cols(), |i, j| inner[(i, j)] + co.a_vec[i] * self.w2_init[j]);
        let w1 = self.w1_init.add(&x.transpose().matmul(&outer).ok()?).ok()?;
        let xb = x.t_matvec(&co.b).ok()?;
        let tail = self.w1_init.t_matvec(&xb).ok()?;
        let w2 = self.w2_init.iter().zip(&tail).map(|(&w, &t)| co.c * w + t).collect();
        Some((w1, w2))
    }

    /// Largest entrywise gap between the trained weights and the closed form;
    /// zero before the first fit.
    pub fn closed_form_residual(&self) -> T {
        match self.closed_form() {
            Some((w1, w2)) => {
                let r1 = w1.max_abs_diff(&self.w1).unwrap_or_else(|_| T::infinity());
                let r2 = w2.iter().zip(&self.w2).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
                r1.max(r2)
            }
            None => T::zero(),
        }
    }

    /// `W1 ← U W1` for the current and the initial weights.
    pub fn rotate_input(&mut self, u: &DenseMatrix<T>) -> Result<()> {
        self.w1 = u.matmul(&self.w1)?;
        self.w1_init = u.matmul(&self.w1_init)?;
        if let Some(x) = &self.xtr {
            self.xtr = Some(x.matmul(&u.transpose())?);
        }
        Ok(())
    }
}

pub(crate) fn output_weights<T: Scalar>(h: usize, seed: u64) -> Vec<T> {
    let s = 1.0 / (h as f64).sqrt();
    rng::normals(&mut rng::stream(seed, "init-output", 0), h).into_iter().map(|z| T::of(s * z)).collect()
}

impl<T: Scalar> Predictor<T> for TwoLayerModel<T> {
    fn input_dim(&self) -> usize {
        self.w1.rows()
    }

    fn predict(&self, x: &[T]) -> T {
        let hidden = self.w1.t_matvec(x).expect("dimension checked by caller");
        dot(&hidden, &self.w2)
    }
}

pub fn train_two_layer<T: Scalar>(p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<TwoLayerModel<T>> {
    cfg.validate()?;
    let mut m = TwoLayerModel::init(p.dim(), cfg, seed)?;
    m.fit(p, k, cfg)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::sylvester;
    use crate::learners::{average_loss, LossKind};
    use crate::problems::sign_flip_problem;

    #[test]
    fn closed_form_holds_every_step() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(4).unwrap(), 3);
        let cfg = LearnerConfig::new(0.02, Init::gaussian(16)).hidden(5);
        let mut m = TwoLayerModel::init(16, &cfg, 8).unwrap();
        for _ in 0..20 {
            m.fit(&p, 6, &cfg).unwrap();
        }
        let one = cfg.clone().epochs(40);
        let mut m2 = TwoLayerModel::init(16, &one, 8).unwrap();
        m2.fit(&p, 6, &one).unwrap();
        assert!(m2.closed_form_residual() < 1e-10, "{}", m2.closed_form_residual());
        assert!(m.closed_form_residual() < 1e-10);
    }

    #[test]
    fn reflective_sign_counterexample() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(3).unwrap(), 21);
        let cfg = LearnerConfig::new(1.0, Init::ReflectiveSign).hidden(1);
        for seed in 0..8 {
            let m = train_two_layer(&p, 1, &cfg, seed).unwrap();
            assert!(average_loss(&m, &p, LossKind::Square).unwrap() < 1e-24);
        }
    }

    #[test]
    fn loss_decreases() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(3).unwrap(), 1);
        let cfg = LearnerConfig::new(0.05, Init::gaussian(8)).hidden(4).epochs(200);
        let m0 = TwoLayerModel::init(8, &cfg, 2).unwrap();
        let m = train_two_layer(&p, 8, &cfg, 2).unwrap();
        assert!(average_loss(&m, &p, LossKind::Square).unwrap() < average_loss(&m0, &p, LossKind::Square).unwrap());
    }
}
