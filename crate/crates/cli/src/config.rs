//! `key = value` pipeline configuration.
//!
//! ```text
//! # comments start with '#'
//! grid.m1_min = 32.0
//! grid.detectors = H1, L1
//! detector.L1.psi = 0.3
//! training.decoder = logsig
//! paths.bank_dir = bank
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gwsae_core::{Activation, DetectorConfig, DetectorName, GridSpec, TrainingConfig};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Paths {
    pub bank_dir: PathBuf,
    pub model: PathBuf,
    pub output_dir: PathBuf,
}

impl Paths {
    fn relative_to(base: &Path) -> Self {
        Self {
            bank_dir: base.join("bank"),
            model: base.join("model.txt"),
            output_dir: base.join("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub grid: GridSpec,
    /// Pads every template to at least this many samples.
    pub pad_length: Option<usize>,
    pub training: TrainingConfig,
    pub paths: Paths,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            pad_length: None,
            training: TrainingConfig::default(),
            paths: Paths::relative_to(Path::new(".")),
        }
    }
}

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: invalid value '{value}' for {key}")))
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg = Self {
            paths: Paths::relative_to(base),
            ..Self::default()
        };
        let mut seen = HashSet::new();
        let mut overrides: Vec<(usize, DetectorName, String, f64)> = Vec::new();
        let mut detectors: Option<Vec<DetectorName>> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = gwsae_core::format::parse_key_value(content)
                .ok_or_else(|| CliError::Config(format!("line {line}: expected 'key = value'")))?;
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config(format!("line {line}: duplicate key {key}")));
            }
            let g = &mut cfg.grid;
            let t = &mut cfg.training;
            match key {
                "grid.m1_min" => g.m1_min = parse(line, key, value)?,
                "grid.m1_max" => g.m1_max = parse(line, key, value)?,
                "grid.m2_min" => g.m2_min = parse(line, key, value)?,
                "grid.m2_max" => g.m2_max = parse(line, key, value)?,
                "grid.step" => g.step = parse(line, key, value)?,
                "grid.spin1" => g.spin1 = parse(line, key, value)?,
                "grid.spin2" => g.spin2 = parse(line, key, value)?,
                "grid.sample_rate_hz" => g.sample_rate = parse(line, key, value)?,
                "grid.f_min" => g.f_min = parse(line, key, value)?,
                "grid.distance_mpc" => g.distance = parse(line, key, value)?,
                "grid.inclination" => g.inclination = parse(line, key, value)?,
                "grid.pad_length" => cfg.pad_length = Some(parse(line, key, value)?),
                "grid.detectors" => {
                    let names = value
                        .split(',')
                        .map(|s| parse::<DetectorName>(line, key, s.trim()))
                        .collect::<Result<Vec<_>, _>>()?;
                    detectors = Some(names);
                }
                "training.max_epochs" => t.max_epochs = parse(line, key, value)?,
                "training.l2_weight" => t.l2_weight = parse(line, key, value)?,
                "training.sparsity_weight" => t.sparsity_weight = parse(line, key, value)?,
                "training.sparsity_target" => t.sparsity_target = parse(line, key, value)?,
                "training.learning_rate" => t.learning_rate = parse(line, key, value)?,
                "training.momentum" => t.momentum = parse(line, key, value)?,
                "training.seed" => t.seed = parse(line, key, value)?,
                "training.hidden_dim" => t.hidden_dim = parse(line, key, value)?,
                "training.decoder" => t.decoder = parse::<Activation>(line, key, value)?,
                "paths.bank_dir" => cfg.paths.bank_dir = base.join(value),
                "paths.model" => cfg.paths.model = base.join(value),
                "paths.output_dir" => cfg.paths.output_dir = base.join(value),
                _ => match key.strip_prefix("detector.").and_then(|r| r.split_once('.')) {
                    Some((name, angle @ ("theta" | "phi" | "psi"))) => {
                        let name = parse::<DetectorName>(line, key, name)?;
                        overrides.push((line, name, angle.to_string(), parse(line, key, value)?));
                    }
                    _ => return Err(CliError::Config(format!("line {line}: unknown key {key}"))),
                },
            }
        }

        if let Some(names) = detectors {
            if names.is_empty() {
                return Err(CliError::Config("grid.detectors is empty".into()));
            }
            cfg.grid.detectors = names.into_iter().map(DetectorConfig::default_for).collect();
        }
        for (line, name, angle, value) in overrides {
            let det = cfg
                .grid
                .detectors
                .iter_mut()
                .find(|d| d.name == name)
                .ok_or_else(|| CliError::Config(format!("line {line}: detector {name} is not in grid.detectors")))?;
            match angle.as_str() {
                "theta" => det.theta = value,
                "phi" => det.phi = value,
                _ => det.psi = value,
            }
            *det = DetectorConfig::new(det.name, det.theta, det.phi, det.psi)
                .map_err(|e| CliError::Config(format!("line {line}: {e}")))?;
        }

        cfg.grid.validate()?;
        cfg.training.validate()?;
        if cfg.pad_length == Some(0) {
            return Err(CliError::Config("grid.pad_length must be positive".into()));
        }
        Ok(cfg)
    }
}
