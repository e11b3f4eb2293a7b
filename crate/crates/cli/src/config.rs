//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use qdnls::resonance::parse_rational;
use qdnls::{Error, Rational, Result};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Simulate,
    Picard,
    ResonanceScan,
    Strichartz,
    Bilinear,
    Trilinear,
    VnormSelftest,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Simulate,
        ExperimentKind::Picard,
        ExperimentKind::ResonanceScan,
        ExperimentKind::Strichartz,
        ExperimentKind::Bilinear,
        ExperimentKind::Trilinear,
        ExperimentKind::VnormSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Picard => "picard",
            ExperimentKind::ResonanceScan => "resonance-scan",
            ExperimentKind::Strichartz => "strichartz",
            ExperimentKind::Bilinear => "bilinear",
            ExperimentKind::Trilinear => "trilinear",
            ExperimentKind::VnormSelftest => "vnorm-selftest",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment {s:?}")))
    }
}

const KEYS: &[&str] = &[
    "experiment", "d", "K", "scale", "alpha", "beta", "gamma", "T", "dt", "tol", "trials", "seed", "out",
    "amplitude", "data_radius", "stride", "max_iter", "steps", "snapshots", "N", "p", "sigma", "H", "L",
    "case", "sigma1", "sigma2", "N1", "N2", "N3", "c_split", "mode", "time_samples", "paths", "max_len",
];

/// Parsed configuration. Experiment-specific keys stay as text and are read
/// with the typed getters.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub dim: usize,
    pub cutoff: usize,
    pub scale: f64,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub t_final: Option<f64>,
    pub dt: f64,
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    values: BTreeMap<String, String>,
    hash: String,
}

fn bad(key: &str, v: &str) -> Error {
    Error::InvalidParameter(format!("cannot parse {key} = {v:?}"))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::InvalidParameter(format!("line {}: unknown key {k:?}", no + 1)));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::InvalidParameter(format!("line {}: duplicate key {k:?}", no + 1)));
            }
        }
        let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        let mut cfg = ExperimentConfig {
            kind: None,
            dim: 2,
            cutoff: 16,
            scale: 1.0,
            alpha: parse_rational("1")?,
            beta: parse_rational("2")?,
            gamma: parse_rational("3")?,
            t_final: None,
            dt: 1e-3,
            tol: 1e-10,
            trials: 10,
            seed: 0,
            out: None,
            values,
            hash,
        };
        if let Some(v) = cfg.values.get("experiment") {
            cfg.kind = Some(v.parse()?);
        }
        cfg.dim = cfg.get("d", cfg.dim)?;
        cfg.cutoff = cfg.list::<usize>("K")?.map_or(Ok(cfg.cutoff), |l| {
            l.first().copied().ok_or_else(|| bad("K", ""))
        })?;
        cfg.scale = cfg.get("scale", cfg.scale)?;
        for (key, slot) in [("alpha", &mut cfg.alpha), ("beta", &mut cfg.beta), ("gamma", &mut cfg.gamma)] {
            if let Some(v) = cfg.values.get(key) {
                *slot = parse_rational(v)?;
            }
        }
        cfg.t_final = cfg.opt("T")?;
        cfg.dt = cfg.get("dt", cfg.dt)?;
        cfg.tol = cfg.get("tol", cfg.tol)?;
        cfg.trials = cfg.get("trials", cfg.trials)?;
        cfg.seed = cfg.get("seed", cfg.seed)?;
        cfg.out = cfg.values.get("out").map(PathBuf::from);
        if !(cfg.scale > 0.0) || !(cfg.dt > 0.0) || !(cfg.tol > 0.0) {
            return Err(Error::InvalidParameter("scale, dt and tol must be positive".into()));
        }
        if !(1..=4).contains(&cfg.dim) {
            return Err(Error::InvalidParameter(format!("d = {} outside 1..=4", cfg.dim)));
        }
        Ok(cfg)
    }

    /// SHA-256 of the configuration text.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| bad(key, v)))
            .transpose()
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.values
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| x.trim().parse::<T>().map_err(|_| bad(key, v)))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()
    }

    pub fn rational(&self, key: &str, default: &Rational) -> Result<Rational> {
        match self.values.get(key) {
            Some(v) => parse_rational(v),
            None => Ok(default.clone()),
        }
    }

    /// Canonical `key = value` listing of every set key.
    pub fn echo(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
