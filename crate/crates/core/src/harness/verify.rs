//! Named suites of numerical checks, one per result being certified.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundCurve, Spectrum, Theorem};
use crate::error::{invalid, Result};
use crate::hadamard::{bit_pattern_matrix, kernel_dot, psi_expand_int, sylvester, BitPattern, HadamardMatrix};
use crate::harness::experiment::{run_experiment, seed_pair, ExperimentResult, ExperimentSpec, ProblemSpec};
use crate::harness::figure2::{figure2, Figure2Settings};
use crate::io::format_sig;
use crate::learners::{
    average_loss, least_squares, train, unseen_loss, Init, LearnerConfig, LearnerKind, LossKind, Predictor,
    TwoLayerModel,
};
use crate::linalg::{jacobi_eigen, projection_residual, DenseMatrix};
use crate::problems::{apply_feature_map, gaussian_problem, sign_flip_problem, Family, FeatureMap};
use crate::rng::derive_seed;
use crate::rotation::{invariance_test, random_orthogonal};

pub const SUITES: [&str; 18] = [
    "sign-flip",
    "complement",
    "permute",
    "gaussian",
    "least-squares",
    "zero-init",
    "svd-tail",
    "svd-tail-init",
    "shifted-doubled",
    "two-layer-span",
    "sawtooth",
    "psi-kernel",
    "hypergeometric",
    "concentration",
    "counterexamples",
    "reflective-sign",
    "rotation",
    "figure2",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,passed,value,threshold\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.suite,
                c.name,
                c.passed,
                format_sig(c.value, 10),
                format_sig(c.threshold, 10)
            ));
        }
        out
    }
}

struct Suite {
    tag: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(tag: &'static str) -> Self {
        Self { tag, checks: Vec::new() }
    }

    /// Passes when `value ≤ threshold`.
    fn at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.push(name, value <= threshold, value, threshold);
    }

    /// Passes when `value ≥ threshold`.
    fn at_least(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.push(name, value >= threshold, value, threshold);
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.push(name, ok, if ok { 1.0 } else { 0.0 }, 1.0);
    }

    /// Informational line; always passes.
    fn report(&mut self, name: impl Into<String>, value: f64) {
        self.push(name, true, value, f64::NAN);
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, value: f64, threshold: f64) {
        let passed = passed && !value.is_nan();
        self.checks.push(Check { suite: self.tag.into(), name: name.into(), passed, value, threshold });
    }
}

fn slack(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

/// `max_k |mean - target| / (3 stderr)`, with a rounding floor; ≤ 1 passes.
pub fn agreement_ratio(r: &ExperimentResult, target: impl Fn(usize) -> f64) -> f64 {
    r.rows.iter().map(|row| {
        let t = target(row.k);
        (row.mean - t).abs() / (3.0 * row.stderr + slack(t))
    }).fold(0.0, f64::max)
}

/// `max_k (bound - mean) / (3 stderr)`; ≤ 1 passes.
pub fn shortfall_ratio(r: &ExperimentResult, bound: impl Fn(usize) -> f64) -> f64 {
    r.rows.iter().map(|row| {
        let t = bound(row.k);
        (t - row.mean) / (3.0 * row.stderr + slack(t))
    }).fold(f64::NEG_INFINITY, f64::max)
}

fn experiment(family: Family, d: usize, learner: LearnerKind, cfg: LearnerConfig<f64>, seeds: usize, seed: u64) -> Result<ExperimentResult> {
    let mut spec = ExperimentSpec::new(ProblemSpec::new(family, d), learner, cfg);
    spec.seeds = seeds;
    spec.master_seed = seed;
    run_experiment(&spec)
}

fn bound_of(r: &ExperimentResult) -> impl Fn(usize) -> f64 + '_ {
    move |k| r.row(k).and_then(|row| row.bound).unwrap_or(f64::NAN)
}

/// Run one suite, or every suite in order for `all`.
pub fn verify(tag: &str, master_seed: u64) -> Result<VerifyReport> {
    let tags: Vec<&str> = if tag == "all" { SUITES.to_vec() } else { vec![tag] };
    let mut report = VerifyReport::default();
    for t in tags {
        let seed = derive_seed(master_seed, t, 0);
        report.checks.extend(run_suite(t, seed)?);
    }
    Ok(report)
}

fn run_suite(tag: &str, seed: u64) -> Result<Vec<Check>> {
    let suite = match tag {
        "sign-flip" => sign_flip(seed)?,
        "complement" => complement(seed)?,
        "permute" => permute(seed)?,
        "gaussian" => gaussian(seed)?,
        "least-squares" => least_squares_suite(seed)?,
        "zero-init" => zero_init()?,
        "svd-tail" => svd_tail(seed)?,
        "svd-tail-init" => svd_tail_init(seed)?,
        "shifted-doubled" => shifted_doubled(seed)?,
        "two-layer-span" => two_layer_span(seed)?,
        "sawtooth" => sawtooth(seed)?,
        "psi-kernel" => psi_kernel()?,
        "hypergeometric" => hypergeometric(seed)?,
        "concentration" => concentration(seed)?,
        "counterexamples" => counterexamples(seed)?,
        "reflective-sign" => reflective_sign(seed)?,
        "rotation" => rotation(seed)?,
        "figure2" => figure2_suite(seed)?,
        other => return invalid(format!("unknown verify suite '{other}'; expected one of {} or all", SUITES.join(", "))),
    };
    Ok(suite.checks)
}

fn sign_flip(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("sign-flip");
    let d = 16;
    let gauss = experiment(Family::SignFlip, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 500, seed)?;
    s.at_most("linear gaussian init above 1-k/d", shortfall_ratio(&gauss, bound_of(&gauss)), 1.0);
    let zero = experiment(Family::SignFlip, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::Zero), 500, seed)?;
    s.at_most("linear zero init equals 1-k/d", agreement_ratio(&zero, bound_of(&zero)), 1.0);
    let mlp_cfg = LearnerConfig::new(0.01, Init::gaussian(d)).hidden(16).epochs(50);
    let mlp = experiment(Family::SignFlip, d, LearnerKind::Mlp, mlp_cfg, 100, seed)?;
    s.at_most("mlp above 1-k/d", shortfall_ratio(&mlp, bound_of(&mlp)), 1.0);
    Ok(s)
}

fn complement(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("complement");
    let d = 16;
    let h = sylvester(4)?;
    let mut worst: f64 = 0.0;
    for k in 0..d {
        let est = bounds::simulate_constant_predictor(&h, true, k, 500, derive_seed(seed, "optimal", k as u64))?;
        let t = bounds::curve_complement(d, k)?;
        worst = worst.max((est.mean - t).abs() / (3.0 * est.stderr + slack(t)));
    }
    s.at_most("constant 1/2 predictor equals 1/4(1-k/(d-1))", worst, 1.0);
    let lin = experiment(Family::Complement01, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 500, seed)?;
    s.at_most("linear above 1/4(1-k/(d-1))", shortfall_ratio(&lin, bound_of(&lin)), 1.0);
    Ok(s)
}

fn permute(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("permute");
    let d = 16;
    let mut worst: f64 = 0.0;
    for k in 0..d {
        let est = bounds::simulate_hypergeometric(d, k, 2000, derive_seed(seed, "perm", k as u64))?;
        let t = bounds::curve_permute(d, k)?;
        worst = worst.max((est.average_loss.mean - t).abs() / (3.0 * est.average_loss.stderr + slack(t)));
    }
    s.at_most("label-average predictor equals 1-k/(d-1)", worst, 1.0);
    let lin = experiment(Family::Permuted, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 500, seed)?;
    s.at_most("linear above 1-k/(d-1)", shortfall_ratio(&lin, bound_of(&lin)), 1.0);
    Ok(s)
}

fn gaussian(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("gaussian");
    let d = 16;
    let lin = experiment(Family::GaussianSparse, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::Zero), 500, seed)?;
    s.at_most("linear above (1-k/d)^2", shortfall_ratio(&lin, bound_of(&lin)), 1.0);
    Ok(s)
}

fn least_squares_suite(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("least-squares");
    let d = 16;
    let ls = experiment(Family::GaussianSparse, d, LearnerKind::LeastSquares, LearnerConfig::new(1.0, Init::Zero), 500, seed)?;
    s.at_most("mean equals (1-k/d)^2", agreement_ratio(&ls, bound_of(&ls)), 1.0);
    let mut e1 = vec![0.0; d];
    e1[1] = 1.0;
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let (pseed, _) = seed_pair(seed, i);
        let p = gaussian_problem::<f64>(d, d, &e1, pseed)?;
        for k in 0..=d {
            let m = least_squares(&p, k)?;
            for t in 0..k {
                worst = worst.max(LossKind::Square.eval(p.label(t), m.predict(p.x.row(t))));
            }
        }
    }
    s.at_most("seen-row loss", worst, 1e-10);
    Ok(s)
}

fn zero_init() -> Result<Suite> {
    let mut s = Suite::new("zero-init");
    let d = 16;
    let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.05).collect();
    for k in [0, 4, 8, 12, 16] {
        let t = bounds::zero_init_optimality_sweep(d, k, &grid)?;
        s.at_most(format!("k={k} argmin |t|"), t.argmin_t.abs(), 0.0);
        let at0 = t.rows.iter().find(|r| r.t == 0.0).map(|r| r.average_loss).unwrap_or(f64::NAN);
        s.at_most(format!("k={k} loss at t=0 minus 1-k/d"), (at0 - bounds::curve_sign_flip(d, k)?).abs(), 1e-12);
        let sym = t.rows.iter().zip(t.rows.iter().rev()).all(|(a, b)| a.average_loss == b.average_loss);
        s.holds(format!("k={k} symmetric in t"), sym);
        let inc = t.rows[10..].windows(2).all(|w| w[1].pair_term > w[0].pair_term);
        s.holds(format!("k={k} increasing in |t|"), inc);
    }
    Ok(s)
}

fn svd_tail(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("svd-tail");
    for q in 2..=8 {
        let d = 1usize << q;
        let spec = Spectrum::of(&sylvester(q)?.to_matrix::<f64>())?;
        let worst = (0..=d).map(|k| (spec.tail_fraction(k) - (1.0 - k as f64 / d as f64)).abs()).fold(0.0, f64::max);
        s.at_most(format!("d={d} tail equals 1-k/d"), worst, 1e-10);
        s.at_most(format!("d={d} zero at k=rank"), spec.tail_fraction(spec.rank()), 0.0);
    }
    let d = 256;
    let mut r = crate::rng::stream(seed, "random-sign-matrix", 0);
    let m = DenseMatrix::from_fn(d, d, |_, _| crate::rng::sign(&mut r));
    let spec = Spectrum::of(&m)?;
    // smallest c' with tail ≥ 1 - c' k/d at every k
    let c = (1..=d).map(|k| (1.0 - spec.tail_fraction(k)) * d as f64 / k as f64).fold(0.0, f64::max);
    s.report("random sign d=256 empirical c'", c);
    Ok(s)
}

fn svd_tail_init(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("svd-tail-init");
    for q in 2..=6 {
        let d = 1usize << q;
        let y = crate::problems::doubled_targets::<f64>(&sylvester(q)?, false).y;
        let spec = Spectrum::of(&y)?;
        let flat = spec.squared_singular_values.iter().enumerate().map(|(i, &v)| {
            let expect = if i < d { 2.0 * d as f64 } else { 0.0 };
            (v - expect).abs()
        }).fold(0.0, f64::max);
        s.at_most(format!("d={d} squared singular values 2d"), flat, 1e-8);
        let worst = (0..d).map(|k| (spec.tail_fraction(k + 1) - (1.0 - (k + 1) as f64 / d as f64)).abs()).fold(0.0, f64::max);
        s.at_most(format!("d={d} tail equals 1-(k+1)/d"), worst, 1e-10);
    }
    let d = 8;
    let lin = experiment(Family::DoubledHadamard, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 20, seed)?;
    s.at_most("linear gaussian init above 1-(k+1)/d", shortfall_ratio(&lin, bound_of(&lin)), 1.0);
    Ok(s)
}

fn shifted_doubled(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("shifted-doubled");
    for q in 2..=6 {
        let d = 1usize << q;
        let y = crate::problems::doubled_targets::<f64>(&sylvester(q)?, true).y;
        let closed = bounds::shifted_doubled_spectrum(d)?;
        let (vals, _) = jacobi_eigen(&y.gram_rows())?;
        let worst = vals.iter().zip(&closed.squared_singular_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        s.at_most(format!("d={d} spectrum matches eigendecomposition"), worst, 1e-8);
        s.at_most(format!("d={d} spectrum sums to d^2"), (closed.sum() - (d * d) as f64).abs(), 0.0);
        let curve = (0..d)
            .map(|k| Ok((bounds::entry_normalized_tail(&y, k + 1)? - bounds::curve_shifted_doubled(d, k)).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        s.at_most(format!("d={d} tail equals 1/4-(k+1)/(4d)"), curve, 1e-10);
    }
    let d = 8;
    let lin = experiment(Family::ShiftedDoubled, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 20, seed)?;
    s.at_most("linear above 1/4-(k+1)/(4d)", shortfall_ratio(&lin, bound_of(&lin)), 1.0);
    Ok(s)
}

/// Largest projection residual of `W1 w2` outside the asserted span over
/// `k = 1..=8`, and the largest rank of that span.
pub fn two_layer_span_check(d: usize, h: usize, init: &Init<f64>, orthogonal: bool, steps: usize, seed: u64) -> Result<(f64, Vec<usize>)> {
    let hm = HadamardMatrix::of_dim(d)?;
    let mut worst: f64 = 0.0;
    let mut ranks = Vec::new();
    for k in 1..=8 {
        let p = sign_flip_problem::<f64>(&hm, derive_seed(seed, "span-problem", k as u64));
        let cfg = LearnerConfig::new(0.01, init.clone()).hidden(h).epochs(steps);
        let mut m = TwoLayerModel::init(d, &cfg, derive_seed(seed, "span-init", k as u64))?;
        if orthogonal {
            let u = random_orthogonal::<f64>(d, derive_seed(seed, "span-orth", k as u64))?.into_matrix();
            m = TwoLayerModel::from_init(u, m.w2.clone())?;
        }
        let (w10, w20) = (m.w1.clone(), m.w2.clone());
        m.fit(&p, k, &cfg)?;
        let (xtr, _) = p.prefix(k)?;
        let basis = bounds::two_layer_span_basis(&w10, &w20, &xtr)?;
        worst = worst.max(projection_residual(&basis, &m.combined_weight())?);
        ranks.push(basis.cols());
    }
    Ok((worst, ranks))
}

fn two_layer_span(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("two-layer-span");
    let d = 32;
    let (res, ranks) = two_layer_span_check(d, 16, &Init::gaussian(d), false, 100, seed)?;
    s.at_most("gaussian init residual", res, 1e-8);
    let full = ranks.iter().enumerate().all(|(i, &r)| r == 2 * (i + 1) + 1);
    s.holds("gaussian init span rank 2k+1", full);
    let (res, ranks) = two_layer_span_check(d, d, &Init::gaussian(d), true, 100, seed)?;
    s.at_most("orthogonal init residual", res, 1e-8);
    s.holds("orthogonal init span rank <= k+1", ranks.iter().enumerate().all(|(i, &r)| r <= i + 2));
    let (res, ranks) = two_layer_span_check(d, 16, &Init::Zero, false, 100, seed)?;
    s.at_most("zero init residual", res, 1e-8);
    s.holds("zero init span rank <= k", ranks.iter().enumerate().all(|(i, &r)| r <= i + 1));
    // the recurrences for (A, a, c, b) reproduce the weights
    let p = sign_flip_problem::<f64>(&HadamardMatrix::of_dim(d)?, seed);
    let cfg = LearnerConfig::new(0.01, Init::gaussian(d)).hidden(16).epochs(100);
    let m = crate::learners::train_two_layer(&p, 8, &cfg, seed)?;
    s.at_most("closed form residual", m.closed_form_residual(), 1e-8);
    Ok(s)
}

fn sawtooth(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("sawtooth");
    let mut worst: f64 = 0.0;
    for k in 0..=16 {
        worst = worst.max((bounds::curve_sawtooth(8, 1, k)? - (1.0 - k.div_ceil(2) as f64 / 8.0)).abs());
    }
    s.at_most("q=1 equals 1-ceil(k/2)/d", worst, 1e-15);
    s.at_most("(8,2,5)", (bounds::curve_sawtooth(8, 2, 5)? - 0.75).abs(), 1e-15);
    let half = (1..=4).map(|q| Ok((bounds::curve_sawtooth(8, q, 8 * q)? - 0.5).abs())).collect::<Result<Vec<f64>>>()?;
    s.at_most("half loss at k=qd", half.into_iter().fold(0.0, f64::max), 1e-15);
    s.at_most("iid (16,16)", (bounds::curve_iid(16, 16)? - (15.0f64 / 16.0).powi(16)).abs(), 1e-15);
    let iid = BoundCurve::for_theorem(Theorem::IidCoupon, 16)?;
    s.holds("iid strictly decreasing", iid.values.windows(2).all(|w| w[1] < w[0]));
    let mc = bounds::simulate_coupon(16, 48, 5000, seed);
    let worst = mc.iter().enumerate().map(|(k, e)| {
        let t = bounds::curve_iid(16, k).unwrap_or(f64::NAN);
        (e.mean - t).abs() / (3.0 * e.stderr + slack(t))
    }).fold(0.0, f64::max);
    s.at_most("coupon simulation equals (1-1/d)^k", worst, 1.0);
    let mut spec = ExperimentSpec::new(ProblemSpec { family: Family::Duplicated, d: 8, q: 2, column: 1 }, LearnerKind::Linear, LearnerConfig::new(0.125, Init::gaussian(8)));
    spec.seeds = 100;
    spec.master_seed = seed;
    let lin = run_experiment(&spec)?;
    s.at_most("linear above saw tooth", shortfall_ratio(&lin, bound_of(&lin)), 1.0);
    Ok(s)
}

fn psi_kernel() -> Result<Suite> {
    let mut s = Suite::new("psi-kernel");
    for q in 1..=6u32 {
        let d = 1usize << q;
        let patterns: Vec<BitPattern> = (0..d).map(|i| BitPattern::from_index(i, q as usize)).collect();
        let psi: Vec<Vec<i32>> = patterns.iter().map(psi_expand_int).collect();
        let mut mismatches = 0usize;
        for (a, pa) in patterns.iter().enumerate() {
            for (b, pb) in patterns.iter().enumerate() {
                let direct: i64 = psi[a].iter().zip(&psi[b]).map(|(&x, &y)| (x * y) as i64).sum();
                if kernel_dot(pa, pb)? != direct || direct != if a == b { d as i64 } else { 0 } {
                    mismatches += 1;
                }
            }
        }
        s.at_most(format!("log d={q} kernel equals expanded dot"), mismatches as f64, 0.0);
        let h = sylvester(q)?;
        let mut rows: Vec<Vec<i32>> = (0..d).map(|i| h.row(i).to_vec()).collect();
        let mut images = psi.clone();
        rows.sort();
        images.sort();
        s.holds(format!("log d={q} psi image equals Hadamard rows"), rows == images);
        let bm = bit_pattern_matrix::<f64>(q);
        s.holds(format!("log d={q} bit pattern matrix shape"), bm.shape() == (d, q as usize));
    }
    Ok(s)
}

fn hypergeometric(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("hypergeometric");
    let d = 16;
    s.at_most("(16,4) total", (bounds::hypergeometric_unseen_loss(16, 4)?.total_loss - (16.0 - 64.0 / 15.0)).abs(), 1e-12);
    let (mut wt, mut wm, mut wv) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..=d {
        let closed = bounds::hypergeometric_unseen_loss(d, k)?;
        let est = bounds::simulate_hypergeometric(d, k, 2000, derive_seed(seed, "hyper", k as u64))?;
        let ratio = |e: crate::stats::Summary, t: f64| (e.mean - t).abs() / (3.0 * e.stderr + slack(t));
        wt = wt.max(ratio(est.total_loss, closed.total_loss));
        wm = wm.max(ratio(est.mean_q, closed.mean_q));
        wv = wv.max(ratio(est.var_q, closed.var_q));
    }
    s.at_most("total unseen loss", wt, 1.0);
    s.at_most("mean of q", wm, 1.0);
    s.at_most("variance of q", wv, 1.0);
    Ok(s)
}

fn concentration(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("concentration");
    for d in [64, 128] {
        let k = d / 8;
        let r = bounds::spectrum_concentration(d, k, 200, &[0.0, 1.0, 2.0], derive_seed(seed, "conc", d as u64))?;
        s.at_most(format!("d={d} frobenius identity (relative)"), r.frobenius_rel_err, 1e-12);
        s.holds(format!("d={d} tail >= d^2 - k s1^2"), r.deterministic_holds);
        s.report(format!("d={d} c_hat"), r.c_hat);
        for (t, frac) in &r.exceedance {
            s.report(format!("d={d} k={k} fraction above 1-(c_hat+{t}/sqrt d)^2 k/d"), *frac);
        }
    }
    Ok(s)
}

fn counterexamples(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("counterexamples");
    let d = 16;
    let h = HadamardMatrix::of_dim(d)?;
    let e1_cfg = LearnerConfig::new(1.0 / d as f64, Init::parse("e1", d)?);
    let mut worst: f64 = 0.0;
    let mut embedded: f64 = 0.0;
    for i in 0..100 {
        let p = sign_flip_problem::<f64>(&h, derive_seed(seed, "problem", i));
        let m = train(LearnerKind::Linear, &p, 0, &e1_cfg, 0)?;
        worst = worst.max(average_loss(&m, &p, LossKind::Square)?);
        let q = apply_feature_map(&p, &FeatureMap::ConstantE1 { output_dim: d })?;
        let m = train(LearnerKind::Linear, &q, 1, &LearnerConfig::new(1.0, Init::Zero), 0)?;
        embedded = embedded.max(average_loss(&m, &q, LossKind::Square)?);
    }
    s.at_most("e1 init loss at k=0", worst, 0.0);
    s.at_most("constant embedding loss after one example", embedded, 1e-24);
    Ok(s)
}

fn reflective_sign(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("reflective-sign");
    let d = 16;
    let h = HadamardMatrix::of_dim(d)?;
    let cfg = LearnerConfig::new(1.0, Init::ReflectiveSign).hidden(1);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let p = sign_flip_problem::<f64>(&h, derive_seed(seed, "problem", i));
        let m = train(LearnerKind::TwoLayer, &p, 1, &cfg, derive_seed(seed, "init", i))?;
        worst = worst.max(unseen_loss(&m, &p, 1, LossKind::Square));
    }
    s.at_most("unseen loss after one example", worst, 1e-24);
    Ok(s)
}

/// Largest paired-run deviation for `kind` over `trials` random rotations.
pub fn rotation_deviation(kind: LearnerKind, cfg: &LearnerConfig<f64>, d: usize, trials: usize, seed: u64) -> Result<f64> {
    let h = HadamardMatrix::of_dim(d)?;
    let mut worst: f64 = 0.0;
    for i in 0..trials as u64 {
        let p = sign_flip_problem::<f64>(&h, derive_seed(seed, "problem", i));
        let u = random_orthogonal(d, derive_seed(seed, "rotation", i))?;
        let k = 1 + (i as usize) % d;
        worst = worst.max(invariance_test(kind, cfg, &p, &u, k, derive_seed(seed, "init", i))?);
    }
    Ok(worst)
}

/// Learner configurations used for the rotation checks at dimension `d`.
pub fn rotation_configs(d: usize) -> Vec<(LearnerKind, LearnerConfig<f64>)> {
    vec![
        (LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d))),
        (LearnerKind::TwoLayer, LearnerConfig::new(0.01, Init::gaussian(d)).hidden(8).epochs(50)),
        (LearnerKind::Mlp, LearnerConfig::new(0.01, Init::gaussian(d)).hidden(8).epochs(50)),
    ]
}

pub fn spindly_rotation_config(d: usize) -> LearnerConfig<f64> {
    LearnerConfig::new(0.05, Init::Constant(1.0 / d as f64))
}

fn rotation(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("rotation");
    let d = 16;
    for (kind, cfg) in rotation_configs(d) {
        s.at_most(format!("{kind} deviation"), rotation_deviation(kind, &cfg, d, 20, seed)?, 1e-6);
    }
    let spindly = rotation_deviation(LearnerKind::Spindly, &spindly_rotation_config(d), d, 20, seed)?;
    s.at_least("spindly deviation", spindly, 0.01);
    Ok(s)
}

fn figure2_suite(seed: u64) -> Result<Suite> {
    let mut s = Suite::new("figure2");
    let r = figure2(&Figure2Settings::new(64, 50, seed))?;
    let logd = r.log_d();
    for ds in &r.datasets {
        let k = ds.spindly_k.map(|k| k as f64).unwrap_or(f64::INFINITY);
        s.at_most(format!("{} spindly k to loss<0.1", ds.family), k, r.settings.c_max * logd);
        s.report(format!("{} spindly C = k/log2 d", ds.family), ds.c.unwrap_or(f64::NAN));
        s.at_least(
            format!("{} linear loss when spindly crosses 0.1", ds.family),
            ds.linear_at_spindly_k.unwrap_or(f64::NAN),
            r.settings.separation_floor,
        );
        if ds.family == Family::Permuted {
            s.at_least("Hadamard linear loss at k=d/2", ds.linear_at_half, r.settings.linear_floor);
            s.holds("Hadamard linear above 1-(k+1)/d", ds.linear_above_floor_curve);
        } else {
            s.report(format!("{} linear loss at k=d/2", ds.family), ds.linear_at_half);
        }
    }
    Ok(s)
}
