//! CSV and JSON serialization for matrices, problems, curves and weight dumps.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundCurve;
use crate::error::{Error, Result};
use crate::learners::{LearnerConfig, Model};
use crate::linalg::DenseMatrix;
use crate::problems::{Family, LabelRange, Problem};
use crate::scalar::Scalar;

/// Decimal rendering with `digits` significant digits. Values whose decimal
/// exponent falls outside `[-5, 15)` use scientific notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let digits = digits.max(1);
    // the exponent after rounding to `digits` places
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One matrix row per line, values in shortest round-trip form.
pub fn matrix_to_csv<T: Scalar>(m: &DenseMatrix<T>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| v.f64().to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv<T: Scalar>(text: &str) -> Result<DenseMatrix<T>> {
    let rows: Vec<Vec<T>> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map(T::of)
                        .map_err(|_| Error::Parse(format!("line {}: bad number '{v}'", i + 1)))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_matrix<T: Scalar>(path: &Path, m: &DenseMatrix<T>) -> Result<()> {
    fs::write(path, matrix_to_csv(m))?;
    Ok(())
}

pub fn read_matrix<T: Scalar>(path: &Path) -> Result<DenseMatrix<T>> {
    matrix_from_csv(&fs::read_to_string(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub family: Family,
    pub seed: u64,
    pub target_index: usize,
    pub label_range: LabelRange,
    pub n: usize,
    pub d: usize,
    pub targets: usize,
}

/// Writes `X.csv`, `Y.csv` and `meta.json` into `dir`, creating it.
pub fn write_problem<T: Scalar>(dir: &Path, p: &Problem<T>) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_matrix(&dir.join("X.csv"), &p.x)?;
    write_matrix(&dir.join("Y.csv"), &p.y)?;
    let meta = ProblemMeta {
        family: p.family,
        seed: p.seed,
        target_index: p.target_index,
        label_range: p.label_range,
        n: p.n(),
        d: p.dim(),
        targets: p.y.cols(),
    };
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

pub fn read_problem<T: Scalar>(dir: &Path) -> Result<Problem<T>> {
    let meta: ProblemMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    let x = read_matrix(&dir.join("X.csv"))?;
    let y = read_matrix(&dir.join("Y.csv"))?;
    if x.shape() != (meta.n, meta.d) || y.shape() != (meta.n, meta.targets) {
        return Err(Error::Dimension("matrix shapes disagree with meta.json".into()));
    }
    Problem::new(x, y, meta.family, meta.seed, meta.label_range)?.with_target(meta.target_index)
}

/// `k,value,theorem` rows.
pub fn curve_to_csv(c: &BoundCurve) -> String {
    let mut out = String::from("k,value,theorem\n");
    let tag = c.theorem.tag();
    for (k, v) in c.values.iter().enumerate() {
        out.push_str(&format!("{k},{},{tag}\n", format_sig(*v, 10)));
    }
    out
}

/// Comment header naming the learner and its configuration, then
/// `block,row,col,value` rows for every parameter.
pub fn weights_to_csv<T: Scalar>(m: &Model<T>, cfg: &LearnerConfig<T>) -> String {
    let clip = match cfg.clip {
        Some((lo, hi)) => format!("{lo};{hi}"),
        None => "none".into(),
    };
    let mut out = format!(
        "# learner={},eta={},epochs={},init={},clip={},hidden_units={},online_to_batch={}\nblock,row,col,value\n",
        m.kind_name(),
        cfg.eta,
        cfg.epochs,
        cfg.init,
        clip,
        cfg.hidden_units,
        cfg.online_to_batch
    );
    for (name, block) in m.parameter_blocks() {
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                out.push_str(&format!("{name},{i},{j},{}\n", block[(i, j)].f64()));
            }
        }
    }
    out
}
