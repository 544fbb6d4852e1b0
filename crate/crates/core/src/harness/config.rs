//! Flat `key=value` run configuration. Keys match the command-line flag
//! names; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Every field is optional so that layers (defaults, file, environment,
/// flags) can be merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub d: Option<usize>,
    pub k: Option<Vec<usize>>,
    pub q: Option<usize>,
    pub seeds: Option<usize>,
    pub learner: Option<String>,
    pub problem: Option<String>,
    pub eta: Option<f64>,
    pub epochs: Option<usize>,
    pub init: Option<String>,
    pub clip: Option<String>,
    pub out: Option<String>,
    pub master_seed: Option<u64>,
    pub hidden: Option<usize>,
    pub column: Option<usize>,
    pub workers: Option<usize>,
    pub loss: Option<String>,
}

const KEYS: [&str; 16] = [
    "d", "k", "q", "seeds", "learner", "problem", "eta", "epochs", "init", "clip", "out", "master-seed", "hidden", "column",
    "workers", "loss",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("bad value '{v}' for '{key}'")))
}

/// `3`, `1,2,8` or `0..16` (inclusive).
pub fn parse_k_list(v: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (usize, usize) = (num("k", a.trim())?, num("k", b.trim())?);
        if b < a {
            return Err(Error::Parse(format!("empty k range '{v}'")));
        }
        return Ok((a..=b).collect());
    }
    v.split(',').map(|s| num("k", s.trim())).collect()
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got '{line}'", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Parse(format!("line {}: unknown key '{}'", i + 1, k.trim())));
            }
            map.insert(key, v.trim().to_string());
        }
        let mut s = Settings::default();
        for (k, v) in &map {
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "d" => self.d = Some(num(key, v)?),
            "k" => self.k = Some(parse_k_list(v)?),
            "q" => self.q = Some(num(key, v)?),
            "seeds" => self.seeds = Some(num(key, v)?),
            "learner" => self.learner = Some(v.into()),
            "problem" => self.problem = Some(v.into()),
            "eta" => self.eta = Some(num(key, v)?),
            "epochs" => self.epochs = Some(num(key, v)?),
            "init" => self.init = Some(v.into()),
            "clip" => self.clip = Some(v.into()),
            "out" => self.out = Some(v.into()),
            "master-seed" => self.master_seed = Some(num(key, v)?),
            "hidden" => self.hidden = Some(num(key, v)?),
            "column" => self.column = Some(num(key, v)?),
            "workers" => self.workers = Some(num(key, v)?),
            "loss" => self.loss = Some(v.into()),
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Fields set in `over` replace ours.
    pub fn overlay(mut self, over: Settings) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(d, k, q, seeds, learner, problem, eta, epochs, init, clip, out, master_seed, hidden, column, workers, loss);
        self
    }
}

/// `none`, or `lo,hi`.
pub fn parse_clip(v: &str) -> Result<Option<(f64, f64)>> {
    if v == "none" {
        return Ok(None);
    }
    let (a, b) = v.split_once(',').ok_or_else(|| Error::Parse(format!("clip '{v}' is not lo,hi")))?;
    Ok(Some((num("clip", a.trim())?, num("clip", b.trim())?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overlays() {
        let s = Settings::parse("# run\nd = 16\nk=0..3\nmaster_seed=7\nclip=-1,1 # inline\n").unwrap();
        assert_eq!(s.d, Some(16));
        assert_eq!(s.k, Some(vec![0, 1, 2, 3]));
        assert_eq!(s.master_seed, Some(7));
        assert_eq!(parse_clip(s.clip.as_deref().unwrap()).unwrap(), Some((-1.0, 1.0)));
        let o = s.overlay(Settings { d: Some(32), ..Default::default() });
        assert_eq!((o.d, o.master_seed), (Some(32), Some(7)));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(Settings::parse("colour=red").is_err());
        assert!(Settings::parse("d").is_err());
        assert!(Settings::parse("d=x").is_err());
        assert!(parse_k_list("5..2").is_err());
    }
}
