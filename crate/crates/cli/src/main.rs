use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use spindle_core::bounds::BoundCurve;
use spindle_core::harness::config::{parse_clip, Settings};
use spindle_core::harness::svg::{Plot, Series};
use spindle_core::harness::{
    default_config, figure2, run_experiment, seed_pair, verify, ExperimentSpec, Figure2Settings, ProblemSpec,
};
use spindle_core::io::{curve_to_csv, format_sig, weights_to_csv, write_problem};
use spindle_core::learners::{average_loss, train, unseen_loss, Init, LearnerConfig, LearnerKind, LossKind};
use spindle_core::problems::Family;

const SEED_ENV: &str = "SPINDLE_SEED";

#[derive(Parser)]
#[command(name = "spindle", version, about = "Hard problems, learners and lower bounds for rotation invariant gradient descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a problem as X.csv, Y.csv and meta.json
    Generate(Common),
    /// Train one learner on one problem draw and dump its weights
    Train(Common),
    /// Tabulate the lower-bound curve of a problem family
    Curve(Common),
    /// Seed-averaged loss curve against the family's bound
    Experiment(Common),
    /// Linear neuron vs spindly network on single-feature problems
    Figure2(Common),
    /// Run a verification suite, or all of them
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// flat key=value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    /// a count, a list `1,2,8` or an inclusive range `0..16`
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    learner: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// zero, gaussian[:sigma], reflective-sign, constant:c, e1, fixed:a;b;…
    #[arg(long)]
    init: Option<String>,
    /// `lo,hi` or `none`
    #[arg(long, allow_hyphen_values = true)]
    clip: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// also read from SPINDLE_SEED when the flag is absent
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    hidden: Option<usize>,
    /// 0-based target feature for single-feature problems
    #[arg(long)]
    column: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// square, absolute or hinge
    #[arg(long)]
    loss: Option<String>,
}

impl Common {
    /// Defaults < config file < SPINDLE_SEED < flags.
    fn settings(&self) -> Result<Settings> {
        let mut s = match &self.config {
            Some(p) => Settings::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => Settings::default(),
        };
        if let Ok(v) = std::env::var(SEED_ENV) {
            let seed = v.trim().parse().with_context(|| format!("{SEED_ENV}='{v}' is not a u64"))?;
            s.master_seed = Some(seed);
        }
        let flags = Settings {
            d: self.d,
            k: self.k.as_deref().map(spindle_core::harness::config::parse_k_list).transpose()?,
            q: self.q,
            seeds: self.seeds,
            learner: self.learner.clone(),
            problem: self.problem.clone(),
            eta: self.eta,
            epochs: self.epochs,
            init: self.init.clone(),
            clip: self.clip.clone(),
            out: self.out.as_ref().map(|p| p.display().to_string()),
            master_seed: self.master_seed,
            hidden: self.hidden,
            column: self.column,
            workers: self.workers,
            loss: self.loss.clone(),
        };
        Ok(s.overlay(flags))
    }
}

struct Resolved {
    s: Settings,
    d: usize,
    seed: u64,
}

impl Resolved {
    fn new(c: &Common, default_d: usize) -> Result<Self> {
        let s = c.settings()?;
        Ok(Self { d: s.d.unwrap_or(default_d), seed: s.master_seed.unwrap_or(0), s })
    }

    fn problem(&self, default: Family) -> Result<ProblemSpec> {
        let family = match &self.s.problem {
            Some(p) => Family::parse(p)?,
            None => default,
        };
        let mut spec = ProblemSpec::new(family, self.d);
        if let Some(q) = self.s.q {
            spec.q = q;
        }
        if let Some(c) = self.s.column {
            spec.column = c;
        }
        Ok(spec)
    }

    fn learner(&self) -> Result<LearnerKind> {
        Ok(match &self.s.learner {
            Some(l) => LearnerKind::parse(l)?,
            None => LearnerKind::Linear,
        })
    }

    fn config(&self, learner: LearnerKind, problem: &ProblemSpec) -> Result<LearnerConfig<f64>> {
        let mut cfg = default_config(learner, self.d);
        if learner == LearnerKind::Spindly {
            cfg.clip = problem.generate(0)?.label_range.clip();
        }
        if let Some(e) = self.s.eta {
            cfg.eta = e;
        }
        if let Some(e) = self.s.epochs {
            cfg.epochs = e;
        }
        if let Some(i) = &self.s.init {
            cfg.init = Init::parse(i, self.d)?;
        }
        if let Some(c) = &self.s.clip {
            cfg.clip = parse_clip(c)?;
        }
        if let Some(h) = self.s.hidden {
            cfg.hidden_units = h;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn loss(&self) -> Result<LossKind> {
        Ok(match &self.s.loss {
            Some(l) => LossKind::parse(l)?,
            None => LossKind::Square,
        })
    }

    fn out(&self) -> Option<PathBuf> {
        self.s.out.as_ref().map(PathBuf::from)
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn generate(c: &Common) -> Result<bool> {
    let r = Resolved::new(c, 16)?;
    let spec = r.problem(Family::SignFlip)?;
    let p = spec.generate(r.seed)?;
    let dir = r.out().unwrap_or_else(|| PathBuf::from("problem"));
    write_problem(&dir, &p)?;
    println!("{} problem: n={} d={} targets={} -> {}", p.family, p.n(), p.dim(), p.y.cols(), dir.display());
    Ok(true)
}

fn train_cmd(c: &Common) -> Result<bool> {
    let r = Resolved::new(c, 16)?;
    let spec = r.problem(Family::SignFlip)?;
    let learner = r.learner()?;
    let cfg = r.config(learner, &spec)?;
    let loss = r.loss()?;
    let p = spec.generate(r.seed)?;
    let k = match r.s.k.as_deref() {
        None => p.n() / 2,
        Some([k]) => *k,
        Some(_) => bail!("train takes a single --k"),
    };
    let (_, init_seed) = seed_pair(r.seed, 0);
    let m = train(learner, &p, k, &cfg, init_seed)?;
    println!(
        "learner={learner} problem={} d={} k={k} average_loss={} unseen_loss={}",
        p.family,
        p.dim(),
        format_sig(average_loss(&m, &p, loss)?, 10),
        format_sig(unseen_loss(&m, &p, k, loss), 10)
    );
    if let Some(out) = r.out() {
        write_or_print(Some(&out), &weights_to_csv(&m, &cfg))?;
    }
    Ok(true)
}

fn curve(c: &Common) -> Result<bool> {
    let r = Resolved::new(c, 16)?;
    let spec = r.problem(Family::SignFlip)?;
    let theorem = spec.theorem().with_context(|| format!("no bound curve for the {} family", spec.family))?;
    let curve = match spec.family {
        Family::DoubledHadamard | Family::ShiftedDoubled => BoundCurve::tabulate(theorem, spec.n(), |k| {
            Ok(spec.bound(k)?.unwrap_or(f64::NAN))
        })?,
        _ => BoundCurve::for_theorem(theorem, r.d)?,
    };
    write_or_print(r.out().as_deref(), &curve_to_csv(&curve))?;
    Ok(true)
}

fn experiment(c: &Common) -> Result<bool> {
    let r = Resolved::new(c, 16)?;
    let problem = r.problem(Family::SignFlip)?;
    let learner = r.learner()?;
    let cfg = r.config(learner, &problem)?;
    let mut spec = ExperimentSpec::new(problem, learner, cfg);
    if let Some(k) = &r.s.k {
        spec.k_values = k.clone();
    }
    spec.seeds = r.s.seeds.unwrap_or(100);
    spec.loss = r.loss()?;
    spec.master_seed = r.seed;
    spec.workers = r.s.workers;
    let result = run_experiment(&spec)?;
    let out = r.out();
    write_or_print(out.as_deref(), &result.to_csv())?;
    if let Some(path) = out {
        let emp = result.rows.iter().map(|row| (row.k as f64, row.mean)).collect();
        let mut plot = Plot::new(format!("{learner} on {}", spec.problem.family), "examples seen k", "average loss")
            .with(Series::new("empirical mean", emp, "#1f77b4"));
        if result.theorem.is_some() {
            let b = result.rows.iter().filter_map(|row| row.bound.map(|b| (row.k as f64, b))).collect();
            plot = plot.with(Series::new("lower bound", b, "#d62728").dashed());
        }
        write_or_print(Some(&path.with_extension("svg")), &plot.to_svg(560.0, 380.0))?;
    }
    // the curve must not fall measurably below its bound
    let ok = result.rows.iter().all(|row| match row.bound {
        Some(b) => row.mean >= b - 3.0 * row.stderr - 1e-9 * b.abs().max(1.0),
        None => true,
    });
    if !ok {
        eprintln!("empirical mean fell below the bound by more than 3 standard errors");
    }
    Ok(ok)
}

fn figure2_cmd(c: &Common) -> Result<bool> {
    let r = Resolved::new(c, 64)?;
    let mut settings = Figure2Settings::new(r.d, r.s.seeds.unwrap_or(50), r.seed);
    settings.workers = r.s.workers;
    if let Some(e) = r.s.eta {
        settings.spindly_eta = e;
    }
    let report = figure2(&settings)?;
    let dir = r.out().unwrap_or_else(|| PathBuf::from("figure2"));
    fs::create_dir_all(&dir)?;
    for p in &report.panels {
        let name = format!("{}-{}.csv", p.learner, p.family);
        fs::write(dir.join(name), p.result.to_csv())?;
    }
    fs::write(dir.join("figure2.svg"), report.to_svg())?;
    for ds in &report.datasets {
        println!(
            "{}: spindly below {} at k={} (C={}), linear at k=d/2 {}, linear when spindly crosses {}",
            ds.family,
            settings.target_loss,
            ds.spindly_k.map(|k| k.to_string()).unwrap_or_else(|| "never".into()),
            ds.c.map(|c| format!("{c:.3}")).unwrap_or_else(|| "-".into()),
            format_sig(ds.linear_at_half, 4),
            ds.linear_at_spindly_k.map(|l| format_sig(l, 4)).unwrap_or_else(|| "-".into()),
        );
    }
    println!("figure2 {} -> {}", if report.passed() { "PASS" } else { "FAIL" }, dir.display());
    Ok(report.passed())
}

fn verify_cmd(suite: &str, c: &Common) -> Result<bool> {
    let r = Resolved::new(c, 16)?;
    let report = verify(suite, r.seed)?;
    for ch in &report.checks {
        eprintln!("{} {}: {}", if ch.passed { "PASS" } else { "FAIL" }, ch.suite, ch.name);
    }
    write_or_print(r.out().as_deref(), &report.to_csv())?;
    let failed = report.failures().count();
    eprintln!("{} checks, {failed} failed", report.checks.len());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(c) => generate(c),
        Command::Train(c) => train_cmd(c),
        Command::Curve(c) => curve(c),
        Command::Experiment(c) => experiment(c),
        Command::Figure2(c) => figure2_cmd(c),
        Command::Verify { suite, common } => verify_cmd(suite, common),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
