//! End-to-end acceptance checks. Each test prints one PASS/FAIL line and
//! then asserts it.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use spindle_core::bounds;
use spindle_core::hadamard::{kernel_dot, psi_expand_int, sylvester, BitPattern, HadamardMatrix};
use spindle_core::harness::{
    figure2, run_experiment, seed_pair, two_layer_span_check, verify, ExperimentResult, ExperimentSpec, Figure2Settings,
    ProblemSpec,
};
use spindle_core::harness::{rotation_configs, rotation_deviation, spindly_rotation_config};
use spindle_core::learners::{
    average_loss, least_squares, train, unseen_loss, Init, LearnerConfig, LearnerKind, LossKind, Predictor,
};
use spindle_core::problems::{apply_feature_map, doubled_targets, sign_flip_problem, Family, FeatureMap};
use spindle_core::rng::derive_seed;
use spindle_core::stats::Summary;

const SEED: u64 = 20240611;

fn report(n: u32, name: &str, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} {verdict} {name}: {detail}");
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn slack(t: f64) -> f64 {
    1e-9 * t.abs().max(1.0)
}

fn run(family: Family, d: usize, kind: LearnerKind, cfg: LearnerConfig<f64>, seeds: usize) -> ExperimentResult {
    let mut spec = ExperimentSpec::new(ProblemSpec::new(family, d), kind, cfg);
    spec.seeds = seeds;
    spec.master_seed = SEED;
    run_experiment(&spec).unwrap()
}

/// Rows where the mean falls more than 3 stderr below `bound`.
fn below(r: &ExperimentResult, bound: impl Fn(usize) -> f64) -> Vec<usize> {
    r.rows.iter().filter(|row| row.mean < bound(row.k) - 3.0 * row.stderr - slack(bound(row.k))).map(|row| row.k).collect()
}

/// Rows where the mean is more than 3 stderr away from `target`.
fn off(r: &ExperimentResult, target: impl Fn(usize) -> f64) -> Vec<usize> {
    r.rows.iter().filter(|row| (row.mean - target(row.k)).abs() > 3.0 * row.stderr + slack(target(row.k))).map(|row| row.k).collect()
}

fn within(e: &Summary, t: f64) -> bool {
    (e.mean - t).abs() <= 3.0 * e.stderr + slack(t)
}

#[test]
fn criterion_01_sign_flip_linear() {
    let d = 16;
    let start = Instant::now();
    let gauss = run(Family::SignFlip, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 500);
    let zero = run(Family::SignFlip, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::Zero), 500);
    let elapsed = start.elapsed();
    let curve = |k: usize| 1.0 - k as f64 / d as f64;
    assert_eq!(gauss.rows.len(), d + 1);
    let (b, o) = (below(&gauss, curve), off(&zero, curve));
    let ok = b.is_empty() && o.is_empty() && elapsed < Duration::from_secs(10);
    report(1, "sign-flip linear GD", ok, format!("gaussian below at k={b:?}, zero off at k={o:?}, {elapsed:.2?}"));
}

#[test]
fn criterion_02_complement() {
    let d = 16;
    let h = sylvester(4).unwrap();
    let start = Instant::now();
    let curve = |k: usize| bounds::curve_complement(d, k).unwrap();
    let mut constant_bad = Vec::new();
    for k in 0..d {
        let est = bounds::simulate_constant_predictor(&h, true, k, 500, derive_seed(SEED, "constant", k as u64)).unwrap();
        if est.mean < curve(k) - 3.0 * est.stderr - slack(curve(k)) {
            constant_bad.push(k);
        }
    }
    let lin = run(Family::Complement01, d, LearnerKind::Linear, LearnerConfig::new(1.0 / d as f64, Init::gaussian(d)), 500);
    let elapsed = start.elapsed();
    let b = below(&lin, curve);
    let ok = constant_bad.is_empty() && b.is_empty() && elapsed < Duration::from_secs(10);
    report(2, "complement", ok, format!("constant below at k={constant_bad:?}, linear below at k={b:?}, {elapsed:.2?}"));
}

#[test]
fn criterion_03_hypergeometric() {
    let d = 16;
    let mut bad = Vec::new();
    for k in 0..=d {
        let closed = bounds::hypergeometric_unseen_loss(d, k).unwrap();
        if k < d {
            let kf = k as f64;
            assert!((closed.total_loss - (16.0 - kf * 16.0 / 15.0)).abs() < 1e-12);
        }
        let est = bounds::simulate_hypergeometric(d, k, 2000, derive_seed(SEED, "hyper", k as u64)).unwrap();
        for (what, e, t) in [
            ("total", est.total_loss, closed.total_loss),
            ("E[q]", est.mean_q, closed.mean_q),
            ("Var(q)", est.var_q, closed.var_q),
        ] {
            if !within(&e, t) {
                bad.push(format!("{what}@k={k}: {} vs {t}", e.mean));
            }
        }
    }
    report(3, "hypergeometric", bad.is_empty(), format!("{} mismatches {bad:?}", bad.len()));
}

#[test]
fn criterion_04_gaussian_least_squares() {
    let d = 16;
    let ls = run(Family::GaussianSparse, d, LearnerKind::LeastSquares, LearnerConfig::new(1.0, Init::Zero), 500);
    let o = off(&ls, |k| bounds::curve_gaussian(d, k).unwrap());
    let spec = ProblemSpec::new(Family::GaussianSparse, d);
    let mut worst: f64 = 0.0;
    for s in 0..500 {
        let p = spec.generate(seed_pair(SEED, s).0).unwrap();
        for k in 0..=d {
            let m = least_squares(&p, k).unwrap();
            for t in 0..k {
                worst = worst.max(LossKind::Square.eval(p.label(t), m.predict(p.x.row(t))));
            }
        }
    }
    let ok = o.is_empty() && worst < 1e-10;
    report(4, "gaussian least squares", ok, format!("off at k={o:?}, worst seen-row loss {worst:.3e}"));
}

#[test]
fn criterion_05_spectral_certificates() {
    let mut worst_tail: f64 = 0.0;
    for q in 2..=8 {
        let d = 1usize << q;
        let h = sylvester(q).unwrap().to_matrix::<f64>();
        for k in 0..=d {
            worst_tail = worst_tail.max((bounds::svd_tail_bound(&h, k).unwrap() - (1.0 - k as f64 / d as f64)).abs());
        }
    }
    let (mut worst_eig, mut worst_sum, mut worst_curve): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for q in 2..=6 {
        let d = 1usize << q;
        let y = doubled_targets::<f64>(&sylvester(q).unwrap(), true).y;
        let closed = bounds::shifted_doubled_spectrum(d).unwrap();
        let g = y.gram_rows();
        let oracle = DMatrix::from_fn(d, d, |i, j| g[(i, j)]).symmetric_eigen();
        let mut vals: Vec<f64> = oracle.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in vals.iter().zip(&closed.squared_singular_values) {
            worst_eig = worst_eig.max((a - b).abs());
        }
        worst_sum = worst_sum.max((closed.sum() - (d * d) as f64).abs());
        for k in 0..d {
            let formula = 0.25 - (k + 1) as f64 / (4.0 * d as f64);
            let tail = bounds::entry_normalized_tail(&y, k + 1).unwrap();
            worst_curve = worst_curve.max((tail - formula).abs()).max((bounds::curve_shifted_doubled(d, k) - formula).abs());
        }
    }
    let ok = worst_tail < 1e-10 && worst_eig < 1e-8 && worst_sum == 0.0 && worst_curve < 1e-10;
    report(
        5,
        "spectral certificates",
        ok,
        format!("tail {worst_tail:.2e}, eigen {worst_eig:.2e}, sum {worst_sum:.2e}, curve {worst_curve:.2e}"),
    );
}

#[test]
fn criterion_06_two_layer_span() {
    let d = 32;
    let (gauss, _) = two_layer_span_check(d, 16, &Init::gaussian(d), false, 100, SEED).unwrap();
    // W₀W₀ᵀ = I on d inputs needs at least d hidden units
    let (orth, orth_ranks) = two_layer_span_check(d, d, &Init::gaussian(d), true, 100, SEED).unwrap();
    let (zero, zero_ranks) = two_layer_span_check(d, 16, &Init::Zero, false, 100, SEED).unwrap();
    let orth_ok = orth_ranks.iter().zip(1..).all(|(&r, k)| r <= k + 1);
    let zero_ok = zero_ranks.iter().zip(1..).all(|(&r, k)| r <= k);
    let ok = gauss.max(orth).max(zero) < 1e-8 && orth_ok && zero_ok;
    report(
        6,
        "two-layer span",
        ok,
        format!("residuals {gauss:.2e}/{orth:.2e}/{zero:.2e}, orthogonal ranks {orth_ranks:?}, zero ranks {zero_ranks:?}"),
    );
}

#[test]
fn criterion_07_rotation_invariance() {
    let d = 16;
    let mut parts = Vec::new();
    let mut ok = true;
    for (kind, cfg) in rotation_configs(d) {
        let dev = rotation_deviation(kind, &cfg, d, 20, SEED).unwrap();
        ok &= dev < 1e-6;
        parts.push(format!("{kind} {dev:.2e}"));
    }
    let spindly = rotation_deviation(LearnerKind::Spindly, &spindly_rotation_config(d), d, 20, SEED).unwrap();
    ok &= spindly > 0.01;
    parts.push(format!("spindly {spindly:.3}"));
    report(7, "rotation invariance", ok, parts.join(", "));
}

#[test]
fn criterion_08_figure2_separation() {
    let start = Instant::now();
    let r = figure2(&Figure2Settings::new(64, 50, SEED)).unwrap();
    let elapsed = start.elapsed();
    let budget = 8.0 * r.log_d();
    let mut ok = elapsed < Duration::from_secs(60);
    let mut parts = Vec::new();
    for ds in &r.datasets {
        let k = ds.spindly_k.map(|k| k as f64).unwrap_or(f64::INFINITY);
        ok &= k <= budget;
        parts.push(format!("{} spindly k={k} (budget {budget}), linear at d/2 {:.3}", ds.family, ds.linear_at_half));
        if ds.family == Family::Permuted {
            ok &= ds.linear_at_half >= 0.4;
        }
    }
    parts.push(format!("{elapsed:.2?}"));
    report(8, "linear vs spindly separation", ok, parts.join("; "));
}

#[test]
fn criterion_09_psi_kernel() {
    let mut bad = 0usize;
    let mut images_ok = true;
    for q in 1..=6u32 {
        let d = 1usize << q;
        let patterns: Vec<BitPattern> = (0..d).map(|i| BitPattern::from_index(i, q as usize)).collect();
        let psi: Vec<Vec<i32>> = patterns.iter().map(psi_expand_int).collect();
        for (a, pa) in patterns.iter().enumerate() {
            for (b, pb) in patterns.iter().enumerate() {
                let direct: i64 = psi[a].iter().zip(&psi[b]).map(|(&x, &y)| i64::from(x) * i64::from(y)).sum();
                if kernel_dot(pa, pb).unwrap() != direct {
                    bad += 1;
                }
            }
        }
        let h = HadamardMatrix::of_dim(d).unwrap();
        let mut rows: Vec<Vec<i32>> = (0..d).map(|i| h.row(i).to_vec()).collect();
        let mut images = psi;
        rows.sort();
        images.sort();
        images_ok &= rows == images;
    }
    report(9, "psi kernel", bad == 0 && images_ok, format!("{bad} kernel mismatches, image equals rows: {images_ok}"));
}

#[test]
fn criterion_10_sawtooth_and_iid_curves() {
    let mut bad = Vec::new();
    let mut expect = |what: String, got: f64, want: f64| {
        if (got - want).abs() > 1e-15 {
            bad.push(format!("{what}: {got} vs {want}"));
        }
    };
    for d in [4usize, 8, 16] {
        for k in 0..=2 * d {
            expect(format!("sawtooth({d},1,{k})"), bounds::curve_sawtooth(d, 1, k).unwrap(), 1.0 - k.div_ceil(2) as f64 / d as f64);
        }
        expect(format!("iid({d},0)"), bounds::curve_iid(d, 0).unwrap(), 1.0);
    }
    expect("sawtooth(8,2,5)".into(), bounds::curve_sawtooth(8, 2, 5).unwrap(), 0.75);
    for q in 1..=4 {
        expect(format!("sawtooth(8,{q},{})", 8 * q), bounds::curve_sawtooth(8, q, 8 * q).unwrap(), 0.5);
    }
    expect("iid(16,16)".into(), bounds::curve_iid(16, 16).unwrap(), (15.0f64 / 16.0).powi(16));
    let decreasing = (0..64).all(|k| bounds::curve_iid(16, k + 1).unwrap() < bounds::curve_iid(16, k).unwrap());
    let mc = bounds::simulate_coupon(16, 48, 5000, SEED);
    let mc_bad: Vec<usize> = (0..mc.len()).filter(|&k| !within(&mc[k], bounds::curve_iid(16, k).unwrap())).collect();
    let ok = bad.is_empty() && decreasing && mc_bad.is_empty();
    report(10, "saw-tooth and iid curves", ok, format!("value mismatches {bad:?}, decreasing {decreasing}, coupon off at k={mc_bad:?}"));
}

#[test]
fn criterion_11_spectrum_concentration() {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [64usize, 128] {
        let k = d / 8;
        let r = bounds::spectrum_concentration(d, k, 200, &[0.0, 1.0, 2.0], derive_seed(SEED, "conc", d as u64)).unwrap();
        assert_eq!(r.tail_fractions.len(), 200);
        ok &= r.frobenius_rel_err < 1e-12 && r.deterministic_holds;
        let floor = 1.0 - r.c_hat * r.c_hat * k as f64 / d as f64;
        let above = r.tail_fractions.iter().filter(|&&t| t >= floor).count() as f64 / 200.0;
        parts.push(format!(
            "d={d}: frobenius rel err {:.1e}, inequality {}, c_hat {:.3}, fraction above 1-c_hat^2 k/d {above:.3}",
            r.frobenius_rel_err, r.deterministic_holds, r.c_hat
        ));
    }
    report(11, "spectrum concentration", ok, parts.join("; "));
}

#[test]
fn criterion_12_counterexamples() {
    let d = 16;
    let h = HadamardMatrix::of_dim(d).unwrap();
    let e1 = LearnerConfig::new(1.0 / d as f64, Init::parse("e1", d).unwrap());
    let (mut e1_worst, mut embed_worst, mut reflect_worst): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..500 {
        let p = sign_flip_problem::<f64>(&h, derive_seed(SEED, "problem", i));
        let m = train(LearnerKind::Linear, &p, 0, &e1, 0).unwrap();
        e1_worst = e1_worst.max(average_loss(&m, &p, LossKind::Square).unwrap());
        let q = apply_feature_map(&p, &FeatureMap::ConstantE1 { output_dim: d }).unwrap();
        let m = train(LearnerKind::Linear, &q, 1, &LearnerConfig::new(1.0, Init::Zero), 0).unwrap();
        embed_worst = embed_worst.max(average_loss(&m, &q, LossKind::Square).unwrap());
        let cfg = LearnerConfig::new(1.0, Init::ReflectiveSign).hidden(1);
        let m = train(LearnerKind::TwoLayer, &p, 1, &cfg, derive_seed(SEED, "init", i)).unwrap();
        reflect_worst = reflect_worst.max(unseen_loss(&m, &p, 1, LossKind::Square));
    }
    let ok = e1_worst == 0.0 && embed_worst < 1e-24 && reflect_worst < 1e-24;
    report(
        12,
        "counterexamples",
        ok,
        format!("e1 loss at k=0 {e1_worst:.1e}, embedded loss after one {embed_worst:.1e}, reflective unseen {reflect_worst:.1e}"),
    );
}

#[test]
fn criterion_13_determinism() {
    let experiment_csv = |workers: Option<usize>| {
        let mut spec = ExperimentSpec::new(ProblemSpec::new(Family::SignFlip, 16), LearnerKind::Mlp, LearnerConfig::new(0.01, Init::gaussian(16)).hidden(8).epochs(20));
        spec.seeds = 40;
        spec.master_seed = SEED;
        spec.workers = workers;
        run_experiment(&spec).unwrap().to_csv()
    };
    let base = experiment_csv(Some(1));
    let experiment_same = [Some(1), Some(2), Some(4), None].into_iter().all(|w| experiment_csv(w) == base);

    let verify_csv = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| verify("all", SEED).unwrap().to_csv())
    };
    let v1 = verify_csv(1);
    let verify_same = verify_csv(4) == v1 && verify_csv(4) == v1;
    let ok = experiment_same && verify_same;
    report(13, "determinism", ok, format!("experiment identical {experiment_same}, verify all identical {verify_same}"));
}
