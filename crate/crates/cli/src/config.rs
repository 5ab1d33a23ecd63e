//! Flat `section.key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown keys,
//! repeated keys and unparsable values are errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use cfield::analysis::G1Denominator;
use cfield::gpe::ImaginaryTimeOptions;
use cfield::sampler::{InitMode, MoveParams, Schedule};
use sha2::{Digest, Sha256};

/// Environment variable overriding the number of worker threads.
pub const WORKERS_ENV: &str = "CFIELD_WORKERS";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}`")]
    Value { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub atoms: f64,
    pub coupling: f64,
    pub temperature: f64,
    /// Explicit cutoff; otherwise `ceil(mu + T)`.
    pub cutoff: Option<usize>,
    pub extent_factor: f64,
    pub oversample: f64,
    pub moves: MoveParams,
    pub schedule: Schedule,
    pub chains: usize,
    pub base_seed: u64,
    pub init: InitMode,
    pub gpe: ImaginaryTimeOptions,
    /// Steps of the zero-temperature minimiser.
    pub minimize_steps: u64,
    pub temperatures: Vec<f64>,
    pub histogram_bins: Option<usize>,
    pub g1_denominator: G1Denominator,
    pub out_dir: PathBuf,
}

const KEYS: &[&str] = &[
    "model.atoms",
    "model.coupling",
    "model.temperature",
    "model.cutoff",
    "grid.extent_factor",
    "grid.oversample",
    "sampler.theta_scale",
    "sampler.phase_scale",
    "sampler.target_acceptance",
    "sampler.adaptation_interval",
    "sampler.burn_in",
    "sampler.sweeps",
    "sampler.thinning",
    "sampler.chains",
    "sampler.seed",
    "sampler.init",
    "gpe.dtau",
    "gpe.tol",
    "gpe.max_iter",
    "minimize.steps",
    "sweep.temperatures",
    "analysis.bins",
    "analysis.g1_denominator",
    "output.dir",
];

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            atoms: 500.0,
            coupling: 0.0,
            temperature: 20.0,
            cutoff: None,
            extent_factor: 1.5,
            oversample: 4.0,
            moves: MoveParams::default(),
            schedule: Schedule { sweeps: 250_000, burn_in: 200_000, thinning: 5 },
            chains: 1,
            base_seed: 1,
            init: InitMode::Ground,
            gpe: ImaginaryTimeOptions::default(),
            minimize_steps: 2_000_000,
            temperatures: Vec::new(),
            histogram_bins: None,
            g1_denominator: G1Denominator::Literal,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value { key: key.into(), value: value.into() })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1 });
            }
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey { line: i + 1, key: key.into() });
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Duplicate { line: i + 1, key: key.into() });
            }
        }
        let mut cfg = Self::default();
        for (key, value) in &entries {
            let (k, v) = (key.as_str(), value.as_str());
            match k {
                "model.atoms" => cfg.atoms = parse(k, v)?,
                "model.coupling" => cfg.coupling = parse(k, v)?,
                "model.temperature" => cfg.temperature = parse(k, v)?,
                "model.cutoff" => cfg.cutoff = Some(parse(k, v)?),
                "grid.extent_factor" => cfg.extent_factor = parse(k, v)?,
                "grid.oversample" => cfg.oversample = parse(k, v)?,
                "sampler.theta_scale" => cfg.moves.theta_scale = parse(k, v)?,
                "sampler.phase_scale" => cfg.moves.phase_scale = parse(k, v)?,
                "sampler.target_acceptance" => cfg.moves.target_acceptance = parse(k, v)?,
                "sampler.adaptation_interval" => cfg.moves.adaptation_interval = parse(k, v)?,
                "sampler.burn_in" => cfg.schedule.burn_in = parse(k, v)?,
                "sampler.sweeps" => cfg.schedule.sweeps = parse(k, v)?,
                "sampler.thinning" => cfg.schedule.thinning = parse(k, v)?,
                "sampler.chains" => cfg.chains = parse(k, v)?,
                "sampler.seed" => cfg.base_seed = parse(k, v)?,
                "sampler.init" => {
                    cfg.init = match v {
                        "ground" => InitMode::Ground,
                        "thermal-random" => InitMode::ThermalRandom,
                        _ => return Err(ConfigError::Value { key: k.into(), value: v.into() }),
                    }
                }
                "gpe.dtau" => cfg.gpe.dtau = parse(k, v)?,
                "gpe.tol" => cfg.gpe.tol = parse(k, v)?,
                "gpe.max_iter" => cfg.gpe.max_iter = parse(k, v)?,
                "minimize.steps" => cfg.minimize_steps = parse(k, v)?,
                "sweep.temperatures" => cfg.temperatures = parse_list(k, v)?,
                "analysis.bins" => cfg.histogram_bins = Some(parse(k, v)?),
                "analysis.g1_denominator" => {
                    cfg.g1_denominator = match v {
                        "literal" => G1Denominator::Literal,
                        "symmetric" => G1Denominator::Symmetric,
                        _ => return Err(ConfigError::Value { key: k.into(), value: v.into() }),
                    }
                }
                "output.dir" => cfg.out_dir = PathBuf::from(v),
                _ => unreachable!("key list and match arms disagree"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if !(self.atoms > 0.0 && self.atoms.is_finite()) {
            return invalid(format!("model.atoms = {} must be positive", self.atoms));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return invalid(format!("model.coupling = {} must be non-negative", self.coupling));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return invalid(format!("model.temperature = {} must be non-negative", self.temperature));
        }
        if self.chains == 0 {
            return invalid("sampler.chains must be at least 1".into());
        }
        if self.temperatures.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return invalid("sweep.temperatures must be positive".into());
        }
        self.moves.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.schedule.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// Key-sorted `key = value` text covering every field.
    pub fn render(&self) -> String {
        let init = match self.init {
            InitMode::Ground => "ground",
            InitMode::ThermalRandom => "thermal-random",
        };
        let denom = match self.g1_denominator {
            G1Denominator::Literal => "literal",
            G1Denominator::Symmetric => "symmetric",
        };
        let mut kv: Vec<(&str, String)> = vec![
            ("model.atoms", format!("{:?}", self.atoms)),
            ("model.coupling", format!("{:?}", self.coupling)),
            ("model.temperature", format!("{:?}", self.temperature)),
            ("grid.extent_factor", format!("{:?}", self.extent_factor)),
            ("grid.oversample", format!("{:?}", self.oversample)),
            ("sampler.theta_scale", format!("{:?}", self.moves.theta_scale)),
            ("sampler.phase_scale", format!("{:?}", self.moves.phase_scale)),
            ("sampler.target_acceptance", format!("{:?}", self.moves.target_acceptance)),
            ("sampler.adaptation_interval", self.moves.adaptation_interval.to_string()),
            ("sampler.burn_in", self.schedule.burn_in.to_string()),
            ("sampler.sweeps", self.schedule.sweeps.to_string()),
            ("sampler.thinning", self.schedule.thinning.to_string()),
            ("sampler.chains", self.chains.to_string()),
            ("sampler.seed", self.base_seed.to_string()),
            ("sampler.init", init.into()),
            ("gpe.dtau", format!("{:?}", self.gpe.dtau)),
            ("gpe.tol", format!("{:?}", self.gpe.tol)),
            ("gpe.max_iter", self.gpe.max_iter.to_string()),
            ("minimize.steps", self.minimize_steps.to_string()),
            ("analysis.g1_denominator", denom.into()),
            ("output.dir", self.out_dir.display().to_string()),
        ];
        if let Some(k) = self.cutoff {
            kv.push(("model.cutoff", k.to_string()));
        }
        if let Some(b) = self.histogram_bins {
            kv.push(("analysis.bins", b.to_string()));
        }
        if !self.temperatures.is_empty() {
            let list: Vec<String> = self.temperatures.iter().map(|t| format!("{t:?}")).collect();
            kv.push(("sweep.temperatures", list.join(",")));
        }
        kv.sort();
        kv.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.render().as_bytes()))
    }

    /// Seed of chain `chain` at sweep point `point`.
    pub fn chain_seed(&self, point: usize, chain: usize) -> u64 {
        self.base_seed.wrapping_add((point * self.chains + chain) as u64)
    }
}

/// Worker threads: the environment override if set, else the machine's
/// available parallelism.
pub fn worker_count() -> Result<usize, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ConfigError::Value { key: WORKERS_ENV.into(), value: v }),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
