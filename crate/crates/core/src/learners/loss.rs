use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Square,
    Absolute,
    /// `max(0, 1 - y ŷ)`.
    Hinge,
}

impl LossKind {
    pub fn eval<T: Scalar>(self, y: T, y_hat: T) -> T {
        match self {
            LossKind::Square => (y - y_hat) * (y - y_hat),
            LossKind::Absolute => (y - y_hat).abs(),
            LossKind::Hinge => (T::one() - y * y_hat).max(T::zero()),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            LossKind::Square => "square",
            LossKind::Absolute => "absolute",
            LossKind::Hinge => "hinge",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(LossKind::Square),
            "absolute" => Ok(LossKind::Absolute),
            "hinge" => Ok(LossKind::Hinge),
            _ => Err(Error::Parse(format!("unknown loss '{s}'"))),
        }
    }
}

/// Minimum over predictions of the label-averaged loss, and where it is
/// attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossConstant {
    pub value: f64,
    pub argmin: f64,
}

const GRID_POINTS: usize = 4001;

/// Minimizes `½ (L(lo, ŷ) + L(hi, ŷ))` over `ŷ`: a uniform grid over
/// `[lo - 1, hi + 1]` followed by golden-section refinement inside the best
/// grid cell. Pass `(-1, 1)` for the constant `c` and `(0, 1)` for `c'`.
pub fn loss_property_constant(loss: LossKind, labels: (f64, f64)) -> LossConstant {
    let (lo, hi) = labels;
    let f = |p: f64| 0.5 * (loss.eval(lo, p) + loss.eval(hi, p));
    let (a, b) = (lo.min(hi) - 1.0, lo.max(hi) + 1.0);
    let step = (b - a) / (GRID_POINTS - 1) as f64;
    let best = (0..GRID_POINTS)
        .map(|i| a + step * i as f64)
        .min_by(|x, y| f(*x).partial_cmp(&f(*y)).expect("finite loss"))
        .expect("non-empty grid");

    let (mut l, mut r) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let m1 = r - g * (r - l);
        let m2 = l + g * (r - l);
        if f(m1) <= f(m2) {
            r = m2;
        } else {
            l = m1;
        }
    }
    let refined = 0.5 * (l + r);
    let argmin = if f(refined) <= f(best) { refined } else { best };
    LossConstant { value: f(argmin), argmin }
}
