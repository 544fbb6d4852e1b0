//! The spindly network: every input reaches the output through a chain of
//! two edges that share the weight `u_i`, giving the effective linear weight
//! `u_i²`.

use crate::error::{invalid, Result};
use crate::learners::{guard, LearnerConfig, LossKind, Predictor};
use crate::linalg::dot;
use crate::problems::Problem;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SpindlyModel<T> {
    pub u: Vec<T>,
    pub clip: Option<(T, T)>,
    /// Predict with the uniform mixture of the hypotheses in `history`.
    pub online_to_batch: bool,
    /// Effective weights `u ⊙ u` after each update, when `online_to_batch`.
    pub history: Vec<Vec<T>>,
}

impl<T: Scalar> SpindlyModel<T> {
    pub fn init(d: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Self> {
        Ok(Self {
            u: cfg.init.draw_vector(d, seed)?,
            clip: cfg.clip,
            online_to_batch: cfg.online_to_batch,
            history: Vec::new(),
        })
    }

    pub fn effective_weights(&self) -> Vec<T> {
        self.u.iter().map(|&u| u * u).collect()
    }

    fn clip_value(&self, y: T) -> T {
        match self.clip {
            Some((lo, hi)) => y.max(lo).min(hi),
            None => y,
        }
    }

    /// Unclipped output of the current parameters.
    pub fn raw_output(&self, x: &[T]) -> T {
        self.u.iter().zip(x).fold(T::zero(), |acc, (&u, &xi)| acc + u * u * xi)
    }

    fn mixture(&self) -> Option<&[Vec<T>]> {
        (self.online_to_batch && !self.history.is_empty()).then_some(self.history.as_slice())
    }

    /// One online pass per epoch over rows `0..k`:
    /// `u_i ← u_i - η δ 2 u_i x_i` with `δ` the unclipped residual.
    pub fn fit(&mut self, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>) -> Result<()> {
        if k > p.n() {
            return invalid(format!("k = {k} exceeds the {} available examples", p.n()));
        }
        if p.dim() != self.u.len() {
            return invalid("problem dimension does not match the network");
        }
        let two = T::of(2.0);
        let mut step = 0;
        for _ in 0..cfg.epochs {
            for t in 0..k {
                let x = p.x.row(t);
                let delta = self.raw_output(x) - p.label(t);
                for (u, &xi) in self.u.iter_mut().zip(x) {
                    *u = *u - cfg.eta * delta * two * *u * xi;
                }
                guard(&self.u, step, "u")?;
                if self.online_to_batch {
                    self.history.push(self.effective_weights());
                }
                step += 1;
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Predictor<T> for SpindlyModel<T> {
    fn input_dim(&self) -> usize {
        self.u.len()
    }

    fn predict(&self, x: &[T]) -> T {
        match self.mixture() {
            Some(h) => {
                let s: T = h.iter().map(|w| self.clip_value(dot(w, x))).sum();
                s / T::of_usize(h.len())
            }
            None => self.clip_value(self.raw_output(x)),
        }
    }

    fn expected_loss(&self, x: &[T], y: T, loss: LossKind) -> T {
        match self.mixture() {
            Some(h) => {
                let s: T = h.iter().map(|w| loss.eval(y, self.clip_value(dot(w, x)))).sum();
                s / T::of_usize(h.len())
            }
            None => loss.eval(y, self.predict(x)),
        }
    }
}

pub fn train_spindly<T: Scalar>(p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<SpindlyModel<T>> {
    cfg.validate()?;
    let mut m = SpindlyModel::init(p.dim(), cfg, seed)?;
    m.fit(p, k, cfg)?;
    Ok(m)
}
