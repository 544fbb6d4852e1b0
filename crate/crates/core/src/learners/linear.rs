use crate::error::{invalid, Error, Result};
use crate::learners::{guard, LearnerConfig, Predictor};
use crate::linalg::{axpy, dot, pinv, RANK_RTOL};
use crate::problems::Problem;
use crate::scalar::Scalar;

/// Single linear neuron `ŷ = w · x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T> {
    pub w: Vec<T>,
}

impl<T: Scalar> LinearModel<T> {
    pub fn new(w: Vec<T>) -> Self {
        Self { w }
    }

    pub fn init(d: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Self> {
        Ok(Self { w: cfg.init.draw_vector(d, seed)? })
    }

    /// Initialization for multiplicative updates; every weight must be
    /// strictly positive.
    pub fn init_positive(d: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Self> {
        let m = Self::init(d, cfg, seed)?;
        if let Some(i) = m.w.iter().position(|&w| !(w > T::zero())) {
            return invalid(format!("EGU needs strictly positive initial weights; w[{i}] = {}", m.w[i]));
        }
        Ok(m)
    }
}

impl<T: Scalar> Predictor<T> for LinearModel<T> {
    fn input_dim(&self) -> usize {
        self.w.len()
    }

    fn predict(&self, x: &[T]) -> T {
        dot(&self.w, x)
    }
}

/// Per-example gradient descent `w ← w - η (w·x - y) x` over rows `0..k`,
/// repeated for `cfg.epochs` passes.
pub fn fit_linear_gd<T: Scalar>(m: &mut LinearModel<T>, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>) -> Result<()> {
    check_prefix(p, k, m.w.len())?;
    let mut step = 0;
    for _ in 0..cfg.epochs {
        for t in 0..k {
            let x = p.x.row(t);
            let delta = dot(&m.w, x) - p.label(t);
            axpy(-cfg.eta * delta, x, &mut m.w);
            guard(&m.w, step, "w")?;
            step += 1;
        }
    }
    Ok(())
}

pub fn train_linear_gd<T: Scalar>(p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<LinearModel<T>> {
    cfg.validate()?;
    let mut m = LinearModel::init(p.dim(), cfg, seed)?;
    fit_linear_gd(&mut m, p, k, cfg)?;
    Ok(m)
}

/// Unnormalized exponentiated gradient, `w_i ← w_i exp(-η (w·x - y) x_i)`.
pub fn fit_egu<T: Scalar>(m: &mut LinearModel<T>, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>) -> Result<()> {
    check_prefix(p, k, m.w.len())?;
    let mut step = 0;
    for _ in 0..cfg.epochs {
        for t in 0..k {
            let x = p.x.row(t);
            let delta = dot(&m.w, x) - p.label(t);
            for (wi, &xi) in m.w.iter_mut().zip(x) {
                *wi = *wi * (-cfg.eta * delta * xi).exp();
            }
            guard(&m.w, step, "w")?;
            step += 1;
        }
    }
    Ok(())
}

pub fn train_egu<T: Scalar>(p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<LinearModel<T>> {
    cfg.validate()?;
    let mut m = LinearModel::init_positive(p.dim(), cfg, seed)?;
    fit_egu(&mut m, p, k, cfg)?;
    Ok(m)
}

/// `w = X₁..ₖ⁺ y₁..ₖ` through the SVD pseudo-inverse; singular values below
/// `1e-10 · s_max` are dropped.
pub fn least_squares<T: Scalar>(p: &Problem<T>, k: usize) -> Result<LinearModel<T>> {
    check_prefix(p, k, p.dim())?;
    if k == 0 {
        return Ok(LinearModel::new(vec![T::zero(); p.dim()]));
    }
    let (x, y) = p.prefix(k)?;
    let w = pinv(&x, RANK_RTOL)?.matvec(&y)?;
    Ok(LinearModel::new(w))
}

fn check_prefix<T: Scalar>(p: &Problem<T>, k: usize, d: usize) -> Result<()> {
    if k > p.n() {
        return invalid(format!("k = {k} exceeds the {} available examples", p.n()));
    }
    if p.dim() != d {
        return Err(Error::Dimension(format!("problem dimension {} vs model input {d}", p.dim())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::sylvester;
    use crate::learners::{average_loss, unseen_loss, Init, LossKind};
    use crate::linalg::{orthonormal_basis, projection_residual};
    use crate::problems::{complement_problem, gaussian_problem, sign_flip_problem};
    use crate::hadamard::strip_first_row;

    fn cfg(eta: f64) -> LearnerConfig<f64> {
        LearnerConfig::new(eta, Init::Zero)
    }

    #[test]
    fn no_examples_no_weights() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(4).unwrap(), 1);
        let m = train_linear_gd(&p, 0, &cfg(1.0 / 16.0), 0).unwrap();
        assert!(m.w.iter().all(|&w| w == 0.0));
        assert_eq!(average_loss(&m, &p, LossKind::Square).unwrap(), 1.0);
    }

    #[test]
    fn sign_flip_seen_exact_unseen_zero() {
        let d = 16;
        for seed in 0..10 {
            let p: Problem<f64> = sign_flip_problem(&sylvester(4).unwrap(), seed);
            for k in 0..=d {
                let m = train_linear_gd(&p, k, &cfg(1.0 / d as f64), 0).unwrap();
                for t in 0..d {
                    let y_hat = m.predict(p.x.row(t));
                    if t < k {
                        assert!((y_hat - p.label(t)).abs() < 1e-12);
                    } else {
                        assert!(y_hat.abs() < 1e-10);
                    }
                }
                let avg = average_loss(&m, &p, LossKind::Square).unwrap();
                assert!((avg - (1.0 - k as f64 / d as f64)).abs() < 1e-12);
                assert!((unseen_loss(&m, &p, k, LossKind::Square) - if k < d { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_init_stays_in_row_span() {
        let e1: Vec<f64> = (0..12).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let problems: Vec<Problem<f64>> = vec![
            gaussian_problem(12, 12, &e1, 4).unwrap(),
            complement_problem(&strip_first_row(&sylvester(4).unwrap()), 2),
        ];
        for p in &problems {
            for k in 1..p.n() {
                let m = train_linear_gd(p, k, &cfg(0.01).epochs(5), 0).unwrap();
                let (xtr, _) = p.prefix(k).unwrap();
                let basis = orthonormal_basis(&xtr.transpose(), RANK_RTOL).unwrap();
                assert!(projection_residual(&basis, &m.w).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn divergence_is_reported() {
        let p: Problem<f64> = sign_flip_problem(&sylvester(4).unwrap(), 1);
        let err = train_linear_gd(&p, 16, &cfg(10.0).epochs(50), 0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err}");
    }

    #[test]
    fn egu_positive_and_rate_zero_is_identity() {
        let p: Problem<f64> = complement_problem(&strip_first_row(&sylvester(3).unwrap()), 5);
        let c = LearnerConfig::new(0.3, Init::Constant(1.0 / 8.0));
        let m = train_egu(&p, 7, &c, 0).unwrap();
        assert!(m.w.iter().all(|&w| w > 0.0));
        let mut frozen = LinearModel::new(vec![0.125; 8]);
        let mut c0 = c.clone();
        c0.eta = 0.0;
        fit_egu(&mut frozen, &p, 7, &c0).unwrap();
        assert_eq!(frozen.w, vec![0.125; 8]);
        assert!(train_egu(&p, 3, &cfg(0.1), 0).is_err());
    }

    #[test]
    fn least_squares_interpolates() {
        let d = 8;
        let w_star: Vec<f64> = (0..d).map(|i| if i == 3 { 1.0 } else { 0.0 }).collect();
        let p: Problem<f64> = gaussian_problem(d, d, &w_star, 9).unwrap();
        let full = least_squares(&p, d).unwrap();
        assert!(average_loss(&full, &p, LossKind::Square).unwrap() < 1e-20);
        for k in 0..d {
            let m = least_squares(&p, k).unwrap();
            for t in 0..k {
                assert!((m.predict(p.x.row(t)) - p.label(t)).powi(2) < 1e-10);
            }
        }
        assert!(least_squares(&p, 0).unwrap().w.iter().all(|&w| w == 0.0));
        assert!(least_squares(&p, d + 1).is_err());
    }
}
