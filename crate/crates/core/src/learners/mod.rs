//! Gradient-descent learners under a common train-on-prefix / predict
//! contract.
//!
//! Updates follow the half-square-loss gradient `½(ŷ - y)²`, so the linear
//! step is `w ← w - η (ŷ - y) x`. Reported losses use the full
//! [`LossKind`] value, `(y - ŷ)²` for square loss.

pub mod linear;
pub mod loss;
pub mod mlp;
pub mod spindly;
pub mod two_layer;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{dim_err, invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::problems::Problem;
use crate::rng;
use crate::scalar::Scalar;

pub use linear::{fit_egu, fit_linear_gd, least_squares, train_egu, train_linear_gd, LinearModel};
pub use loss::{loss_property_constant, LossConstant, LossKind};
pub use mlp::{train_mlp, MlpGradients, MlpModel};
pub use spindly::{train_spindly, SpindlyModel};
pub use two_layer::{train_two_layer, TwoLayerCoefficients, TwoLayerModel};

/// Any weight entry beyond this magnitude aborts training.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Initial input-layer weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init<T> {
    Zero,
    /// i.i.d. `N(0, σ²)` entries: a rotation invariant distribution.
    GaussianRotInv(T),
    /// Every input node starts at this vector.
    FixedVector(Vec<T>),
    /// `s e_1` with one uniform sign `s` shared by all input nodes.
    ReflectiveSign,
    /// Every entry equal to the given value.
    Constant(T),
}

impl<T: Scalar> Init<T> {
    /// Gaussian init with the default scale `1/√d`.
    pub fn gaussian(d: usize) -> Self {
        Init::GaussianRotInv(T::one() / T::of_usize(d).sqrt())
    }

    /// Input weights for `nodes` input nodes of dimension `d`, as a `d x nodes`
    /// matrix.
    pub fn draw_matrix(&self, d: usize, nodes: usize, seed: u64) -> Result<DenseMatrix<T>> {
        match self {
            Init::Zero => Ok(DenseMatrix::zeros(d, nodes)),
            Init::Constant(c) => Ok(DenseMatrix::filled(d, nodes, *c)),
            Init::GaussianRotInv(sigma) => {
                let mut r = rng::stream(seed, "init-input", 0);
                let z = rng::normals(&mut r, d * nodes);
                DenseMatrix::from_vec(d, nodes, z.into_iter().map(|v| *sigma * T::of(v)).collect())
            }
            Init::FixedVector(v) => {
                if v.len() != d {
                    return dim_err(format!("fixed init of length {} for d = {d}", v.len()));
                }
                Ok(DenseMatrix::from_fn(d, nodes, |i, _| v[i]))
            }
            Init::ReflectiveSign => {
                let s = T::of(reflective_sign(seed));
                Ok(DenseMatrix::from_fn(d, nodes, |i, _| if i == 0 { s } else { T::zero() }))
            }
        }
    }

    pub fn draw_vector(&self, d: usize, seed: u64) -> Result<Vec<T>> {
        Ok(self.draw_matrix(d, 1, seed)?.into_vec())
    }
}

impl<T: Scalar> Init<T> {
    /// `zero`, `gaussian` (σ = 1/√d), `gaussian:σ`, `reflective-sign`,
    /// `constant:c`, `e1`, or `fixed:w0;w1;…`.
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        let num = |v: &str| -> Result<T> {
            v.trim().parse::<f64>().map(T::of).map_err(|_| Error::Parse(format!("bad number '{v}' in init '{s}'")))
        };
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("zero", None) => Ok(Init::Zero),
            ("gaussian", None) => Ok(Init::gaussian(d)),
            ("gaussian", Some(a)) => Ok(Init::GaussianRotInv(num(a)?)),
            ("reflective-sign", None) => Ok(Init::ReflectiveSign),
            ("constant", Some(a)) => Ok(Init::Constant(num(a)?)),
            ("e1", None) => Ok(Init::FixedVector((0..d).map(|i| if i == 0 { T::one() } else { T::zero() }).collect())),
            ("fixed", Some(a)) => Ok(Init::FixedVector(a.split(';').map(num).collect::<Result<_>>()?)),
            _ => Err(Error::Parse(format!("unknown init '{s}'"))),
        }
    }
}

impl<T: Scalar> fmt::Display for Init<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Init::Zero => f.write_str("zero"),
            Init::GaussianRotInv(s) => write!(f, "gaussian:{s}"),
            Init::ReflectiveSign => f.write_str("reflective-sign"),
            Init::Constant(c) => write!(f, "constant:{c}"),
            Init::FixedVector(v) => {
                f.write_str("fixed:")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

/// The sign drawn by [`Init::ReflectiveSign`] for `seed`.
pub fn reflective_sign(seed: u64) -> f64 {
    rng::sign(&mut rng::stream(seed, "reflective-sign", 0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig<T> {
    pub eta: T,
    pub epochs: usize,
    pub init: Init<T>,
    pub clip: Option<(T, T)>,
    pub hidden_units: usize,
    pub online_to_batch: bool,
}

impl<T: Scalar> LearnerConfig<T> {
    pub fn new(eta: T, init: Init<T>) -> Self {
        Self { eta, epochs: 1, init, clip: None, hidden_units: 1, online_to_batch: false }
    }

    pub fn epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn clip(mut self, clip: Option<(T, T)>) -> Self {
        self.clip = clip;
        self
    }

    pub fn hidden(mut self, h: usize) -> Self {
        self.hidden_units = h;
        self
    }

    pub fn online_to_batch(mut self, on: bool) -> Self {
        self.online_to_batch = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > T::zero()) {
            return invalid(format!("learning rate must be positive, got {}", self.eta));
        }
        if self.epochs == 0 {
            return invalid("epochs must be at least 1");
        }
        if let Some((lo, hi)) = self.clip {
            if !(lo < hi) {
                return invalid(format!("clip interval ({lo}, {hi}) is empty"));
            }
        }
        if self.hidden_units == 0 {
            return invalid("hidden_units must be at least 1");
        }
        Ok(())
    }
}

/// Anything that maps an instance to a real prediction.
pub trait Predictor<T: Scalar> {
    fn input_dim(&self) -> usize;

    fn predict(&self, x: &[T]) -> T;

    /// Loss incurred on `(x, y)`. Randomized predictors report the expected
    /// loss over their internal randomness.
    fn expected_loss(&self, x: &[T], y: T, loss: LossKind) -> T {
        loss.eval(y, self.predict(x))
    }
}

pub fn predict<T: Scalar, M: Predictor<T> + ?Sized>(model: &M, x: &[T]) -> Result<T> {
    if x.len() != model.input_dim() {
        return dim_err(format!("instance of length {} for a {}-input model", x.len(), model.input_dim()));
    }
    Ok(model.predict(x))
}

/// Mean loss over all `n` rows of the problem, seen and unseen.
pub fn average_loss<T: Scalar, M: Predictor<T> + ?Sized>(model: &M, p: &Problem<T>, loss: LossKind) -> Result<T> {
    if p.dim() != model.input_dim() {
        return dim_err(format!("problem dimension {} vs model input {}", p.dim(), model.input_dim()));
    }
    if p.n() == 0 {
        return invalid("average loss over an empty problem");
    }
    let total: T = p.x.row_iter().enumerate().map(|(t, x)| model.expected_loss(x, p.label(t), loss)).sum();
    Ok(total / T::of_usize(p.n()))
}

/// Rows of a problem that index `0..k` are the training prefix; this returns
/// the mean loss over the remaining rows only.
pub fn unseen_loss<T: Scalar, M: Predictor<T> + ?Sized>(model: &M, p: &Problem<T>, k: usize, loss: LossKind) -> T {
    let n = p.n();
    if k >= n {
        return T::zero();
    }
    let total: T = (k..n).map(|t| model.expected_loss(p.x.row(t), p.label(t), loss)).sum();
    total / T::of_usize(n - k)
}

pub(crate) fn guard<T: Scalar>(weights: &[T], step: usize, what: &str) -> Result<()> {
    let limit = T::of(DIVERGENCE_LIMIT);
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.abs() <= limit)) {
        return Err(Error::Divergence { step, detail: format!("{what}[{i}] = {w}") });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Linear,
    Spindly,
    Egu,
    TwoLayer,
    Mlp,
    LeastSquares,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 6] = [
        LearnerKind::Linear,
        LearnerKind::Spindly,
        LearnerKind::Egu,
        LearnerKind::TwoLayer,
        LearnerKind::Mlp,
        LearnerKind::LeastSquares,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            LearnerKind::Linear => "linear",
            LearnerKind::Spindly => "spindly",
            LearnerKind::Egu => "egu",
            LearnerKind::TwoLayer => "two-layer",
            LearnerKind::Mlp => "mlp",
            LearnerKind::LeastSquares => "least-squares",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown learner '{s}'")))
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A trained (or freshly initialized) model of any kind.
#[derive(Clone, Debug)]
pub enum Model<T> {
    Linear(LinearModel<T>),
    Spindly(SpindlyModel<T>),
    TwoLayer(TwoLayerModel<T>),
    Mlp(MlpModel<T>),
}

impl<T: Scalar> Model<T> {
    /// Fresh model for `kind`, with random parts drawn from `seed`.
    pub fn init(kind: LearnerKind, d: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Self> {
        cfg.validate()?;
        Ok(match kind {
            LearnerKind::Linear | LearnerKind::LeastSquares => Model::Linear(LinearModel::init(d, cfg, seed)?),
            LearnerKind::Egu => Model::Linear(LinearModel::init_positive(d, cfg, seed)?),
            LearnerKind::Spindly => Model::Spindly(SpindlyModel::init(d, cfg, seed)?),
            LearnerKind::TwoLayer => Model::TwoLayer(TwoLayerModel::init(d, cfg, seed)?),
            LearnerKind::Mlp => Model::Mlp(MlpModel::init(d, cfg, seed)?),
        })
    }

    /// Train on rows `0..k` of `p` starting from the current weights.
    pub fn fit(&mut self, kind: LearnerKind, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>) -> Result<()> {
        match (kind, self) {
            (LearnerKind::Linear, Model::Linear(m)) => fit_linear_gd(m, p, k, cfg),
            (LearnerKind::Egu, Model::Linear(m)) => fit_egu(m, p, k, cfg),
            (LearnerKind::LeastSquares, Model::Linear(m)) => {
                *m = least_squares(p, k)?;
                Ok(())
            }
            (LearnerKind::Spindly, Model::Spindly(m)) => m.fit(p, k, cfg),
            (LearnerKind::TwoLayer, Model::TwoLayer(m)) => m.fit(p, k, cfg),
            (LearnerKind::Mlp, Model::Mlp(m)) => m.fit(p, k, cfg),
            (kind, _) => invalid(format!("model does not belong to learner '{kind}'")),
        }
    }

    /// Counter-rotate the input layer, `W ← U W`. The spindly network has no
    /// fully connected input layer; its parameters are left untouched.
    pub fn rotate_input(&mut self, u: &DenseMatrix<T>) -> Result<()> {
        match self {
            Model::Linear(m) => m.w = u.matvec(&m.w)?,
            Model::Spindly(_) => {}
            Model::TwoLayer(m) => m.rotate_input(u)?,
            Model::Mlp(m) => m.w = u.matmul(&m.w)?,
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Linear(_) => "linear",
            Model::Spindly(_) => "spindly",
            Model::TwoLayer(_) => "two-layer",
            Model::Mlp(_) => "mlp",
        }
    }

    /// Named parameter blocks, for weight dumps.
    pub fn parameter_blocks(&self) -> Vec<(&'static str, DenseMatrix<T>)> {
        match self {
            Model::Linear(m) => vec![("w", DenseMatrix::column_vector(&m.w))],
            Model::Spindly(m) => vec![("u", DenseMatrix::column_vector(&m.u))],
            Model::TwoLayer(m) => vec![("w1", m.w1.clone()), ("w2", DenseMatrix::column_vector(&m.w2))],
            Model::Mlp(m) => vec![
                ("w", m.w.clone()),
                ("v", DenseMatrix::column_vector(&m.v)),
                ("bias", DenseMatrix::column_vector(&m.bias)),
                ("out_bias", DenseMatrix::column_vector(&[m.out_bias])),
            ],
        }
    }
}

impl<T: Scalar> Predictor<T> for Model<T> {
    fn input_dim(&self) -> usize {
        match self {
            Model::Linear(m) => m.input_dim(),
            Model::Spindly(m) => m.input_dim(),
            Model::TwoLayer(m) => m.input_dim(),
            Model::Mlp(m) => m.input_dim(),
        }
    }

    fn predict(&self, x: &[T]) -> T {
        match self {
            Model::Linear(m) => m.predict(x),
            Model::Spindly(m) => m.predict(x),
            Model::TwoLayer(m) => m.predict(x),
            Model::Mlp(m) => m.predict(x),
        }
    }

    fn expected_loss(&self, x: &[T], y: T, loss: LossKind) -> T {
        match self {
            Model::Spindly(m) => m.expected_loss(x, y, loss),
            other => loss.eval(y, other.predict(x)),
        }
    }
}

/// Initialize and train `kind` on rows `0..k` of `p`.
pub fn train<T: Scalar>(kind: LearnerKind, p: &Problem<T>, k: usize, cfg: &LearnerConfig<T>, seed: u64) -> Result<Model<T>> {
    let mut m = Model::init(kind, p.dim(), cfg, seed)?;
    m.fit(kind, p, k, cfg)?;
    Ok(m)
}
