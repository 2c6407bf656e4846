use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dfo::OptimizerKind;
use crate::problems::{standard_suite, KindPair};
use crate::tpb::Algorithm;
use crate::{Error, Result};

/// The experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<KindPair>,
    pub dims: Vec<usize>,
    /// Budget is `factor × N`.
    pub budget_factors: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub k_values: Vec<usize>,
    pub d_values: Vec<u32>,
    pub r1st_values: Vec<f64>,
    /// Instance seeds `1..=instances`.
    pub instances: u64,
    /// Algorithm seeds `1..=seeds`.
    pub seeds: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    /// Reference-front resolution.
    pub resolution: usize,
    pub optimizer: OptimizerKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problems: standard_suite(),
            dims: vec![2, 3, 5, 10, 20],
            budget_factors: vec![20, 30, 40],
            algorithms: Algorithm::ALL.to_vec(),
            k_values: vec![3],
            d_values: vec![2],
            r1st_values: vec![0.9],
            instances: 5,
            seeds: 1,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            out_dir: PathBuf::from("tpb-results"),
            resolution: 100,
            optimizer: OptimizerKind::default(),
        }
    }
}

/// Recognized keys, in config-file spelling.
pub const KEYS: [&str; 13] = [
    "problems",
    "dims",
    "budget-factors",
    "algos",
    "K",
    "D",
    "r1st",
    "instances",
    "seeds",
    "workers",
    "out",
    "resolution",
    "optimizer",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = key.trim();
    let alias = match key {
        "budget_factors" => "budget-factors",
        "algorithms" => "algos",
        "k" => "K",
        "d" => "D",
        "r_1st" => "r1st",
        "out_dir" => "out",
        other => other,
    };
    KEYS.iter().copied().find(|k| *k == alias)
}

/// Flat `key = value` text; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<&'static str, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::config(line, format!("line {} is not `key = value`", lineno + 1))
        })?;
        let key = canonical_key(k).ok_or_else(|| Error::config(k.trim(), "unknown key"))?;
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<&'static str, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::config(key, format!("cannot parse `{s}`"))))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::config(key, "list must not be empty"));
    }
    Ok(items)
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn check(key: &str, ok: bool, message: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(key, message))
    }
}

impl ExperimentConfig {
    /// Defaults overridden by `values`, then validated.
    pub fn from_values(values: &BTreeMap<&'static str, String>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (&key, value) in values {
            match key {
                "problems" => cfg.problems = list(key, value)?,
                "dims" => cfg.dims = list(key, value)?,
                "budget-factors" => cfg.budget_factors = list(key, value)?,
                "algos" => cfg.algorithms = list(key, value)?,
                "K" => cfg.k_values = list(key, value)?,
                "D" => cfg.d_values = list(key, value)?,
                "r1st" => cfg.r1st_values = list(key, value)?,
                "instances" => cfg.instances = scalar(key, value)?,
                "seeds" => cfg.seeds = scalar(key, value)?,
                "workers" => cfg.workers = scalar(key, value)?,
                "out" => cfg.out_dir = PathBuf::from(value.trim()),
                "resolution" => cfg.resolution = scalar(key, value)?,
                "optimizer" => cfg.optimizer = scalar(key, value)?,
                other => return Err(Error::config(other, "unknown key")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check("problems", !self.problems.is_empty(), "list must not be empty")?;
        check("dims", !self.dims.is_empty() && self.dims.iter().all(|&n| n >= 2), "need N >= 2")?;
        check(
            "budget-factors",
            !self.budget_factors.is_empty() && self.budget_factors.iter().all(|&b| b >= 1),
            "need factors >= 1",
        )?;
        check("algos", !self.algorithms.is_empty(), "list must not be empty")?;
        check("K", !self.k_values.is_empty() && self.k_values.iter().all(|&k| k >= 2), "need K >= 2")?;
        check("D", !self.d_values.is_empty() && self.d_values.iter().all(|&d| d >= 1), "need D >= 1")?;
        check(
            "r1st",
            !self.r1st_values.is_empty() && self.r1st_values.iter().all(|&r| r > 0.0 && r < 1.0),
            "need 0 < r1st < 1",
        )?;
        check("instances", self.instances >= 1, "need at least one instance")?;
        check("seeds", self.seeds >= 1, "need at least one seed")?;
        check("workers", self.workers >= 1, "need at least one worker")?;
        check("resolution", self.resolution >= 100, "need resolution >= 100")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::FunctionKind;

    fn values(text: &str) -> BTreeMap<&'static str, String> {
        parse_config_text(text).unwrap()
    }

    #[test]
    fn empty_config_gives_defaults() {
        let cfg = ExperimentConfig::from_values(&values("")).unwrap();
        assert_eq!(cfg.dims, vec![2, 3, 5, 10, 20]);
        assert_eq!(cfg.budget_factors, vec![20, 30, 40]);
        assert_eq!((cfg.k_values[0], cfg.d_values[0], cfg.r1st_values[0]), (3, 2, 0.9));
        assert_eq!(cfg.problems.len(), 8);
    }

    #[test]
    fn parses_every_key() {
        let text = "# grid\nproblems = sphere/sphere, sphere/rastrigin\ndims=2,10\n\
                    budget_factors = 20\nalgos = tpb,tpb2\nK = 3,4\nD = 1\nr1st = 0.7, 0.95\n\
                    instances = 2\nseeds = 3\nworkers = 2\nout = /tmp/x\nresolution = 200\noptimizer = nm\n";
        let cfg = ExperimentConfig::from_values(&values(text)).unwrap();
        assert_eq!(cfg.problems[1], KindPair(FunctionKind::Sphere, FunctionKind::Rastrigin));
        assert_eq!(cfg.dims, vec![2, 10]);
        assert_eq!(cfg.algorithms, vec![Algorithm::Tpb, Algorithm::Tpb2]);
        assert_eq!(cfg.k_values, vec![3, 4]);
        assert_eq!(cfg.r1st_values, vec![0.7, 0.95]);
        assert_eq!((cfg.instances, cfg.seeds, cfg.workers), (2, 3, 2));
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/x"));
        assert_eq!(cfg.optimizer, OptimizerKind::NelderMead);
    }

    #[test]
    fn errors_name_the_key() {
        let key_of = |text: &str| match parse_config_text(text).and_then(|v| ExperimentConfig::from_values(&v)) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(key_of("bogus = 1"), "bogus");
        assert_eq!(key_of("r1st = 1.5"), "r1st");
        assert_eq!(key_of("dims = two"), "dims");
        assert_eq!(key_of("problems = sphere/griewank"), "problems");
        assert_eq!(key_of("K = 1"), "K");
        assert_eq!(key_of("dims = "), "dims");
    }
}
