use std::path::Path;
use std::process::{Command, Output};

fn spindle(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spindle"));
    cmd.args(args).env_remove("SPINDLE_SEED");
    if let Some(s) = env_seed {
        cmd.env("SPINDLE_SEED", s);
    }
    cmd.output().expect("spawn spindle")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(o: &Output) {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_writes_problem_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    ok(&spindle(&["generate", "--problem", "sign-flip", "--d", "8", "--out", path(&out)], None));
    for f in ["X.csv", "Y.csv", "meta.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let x = std::fs::read_to_string(out.join("X.csv")).unwrap();
    assert_eq!(x.lines().count(), 8);
}

#[test]
fn train_dumps_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let o = spindle(&["train", "--learner", "spindly", "--problem", "permuted", "--d", "16", "--k", "8", "--out", path(&out)], None);
    ok(&o);
    assert!(stdout(&o).contains("average_loss="));
    let w = std::fs::read_to_string(&out).unwrap();
    assert!(w.starts_with("# learner=spindly,"));
    assert_eq!(w.lines().nth(1), Some("block,row,col,value"));
}

#[test]
fn curve_to_stdout() {
    let o = spindle(&["curve", "--problem", "sign-flip", "--d", "4"], None);
    ok(&o);
    assert_eq!(stdout(&o), "k,value,theorem\n0,1.000000000,sign-flip\n1,0.7500000000,sign-flip\n2,0.5000000000,sign-flip\n3,0.2500000000,sign-flip\n4,0.000000000,sign-flip\n");
}

#[test]
fn experiment_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    ok(&spindle(&["experiment", "--d", "8", "--seeds", "20", "--init", "gaussian", "--out", path(&out)], None));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("k,empirical_mean,stderr,bound,theorem\n"));
    assert_eq!(csv.lines().count(), 10);
    assert!(dir.path().join("e.svg").exists());
}

#[test]
fn experiment_is_deterministic_across_workers() {
    let base = ["experiment", "--d", "8", "--seeds", "40", "--learner", "mlp", "--hidden", "4", "--epochs", "10", "--master-seed", "3"];
    let a = spindle(&[&base[..], &["--workers", "1"]].concat(), None);
    let b = spindle(&[&base[..], &["--workers", "4"]].concat(), None);
    ok(&a);
    assert_eq!(a.stdout, b.stdout);
    let c = spindle(&["experiment", "--d", "8", "--seeds", "40", "--learner", "mlp", "--hidden", "4", "--epochs", "10"], Some("3"));
    assert_eq!(a.stdout, c.stdout, "SPINDLE_SEED should act as the master seed");
    let d = spindle(&base, Some("999"));
    assert_eq!(a.stdout, d.stdout, "the flag wins over the environment");
    let e = spindle(&[&base[..5], &["--master-seed", "4"]].concat(), None);
    assert_ne!(a.stdout, e.stdout);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nd=8\nseeds=5\nk=0..2\n").unwrap();
    let o = spindle(&["experiment", "--config", path(&cfg)], None);
    ok(&o);
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = spindle(&["experiment", "--config", path(&cfg), "--k", "1"], None);
    ok(&o);
    assert_eq!(stdout(&o).lines().count(), 2);
    std::fs::write(&cfg, "nonsense=1\n").unwrap();
    assert_eq!(spindle(&["experiment", "--config", path(&cfg)], None).status.code(), Some(2));
}

#[test]
fn verify_suite_and_exit_codes() {
    let o = spindle(&["verify", "psi-kernel"], None);
    ok(&o);
    assert!(stdout(&o).starts_with("suite,check,passed,value,threshold\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
    assert_eq!(spindle(&["verify", "no-such-suite"], None).status.code(), Some(2));
    assert_eq!(spindle(&["experiment", "--d", "12"], None).status.code(), Some(2));
    assert_ne!(spindle(&["bogus"], None).status.code(), Some(0));
}

#[test]
fn verify_all_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    ok(&spindle(&["verify", "all", "--out", path(&a), "--master-seed", "5"], None));
    ok(&spindle(&["verify", "all", "--out", path(&b)], Some("5")));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
