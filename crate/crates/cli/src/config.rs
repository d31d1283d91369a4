//! Run configuration: JSON parsing, defaults and validation.
//!
//! Every error names the offending field by its dotted path, e.g.
//! `model.grid_sizes: axis 0 has 1 points, need at least 2`.

use std::path::{Path, PathBuf};

use mott_kinetics::dynamics::IntegratorConfig;
use mott_kinetics::scenarios::ScenarioSpec;
use mott_kinetics::{
    build_grid, default_eta, DistributionState, Error as CoreError, KernelConfig, ModelParams,
};
use mott_kinetics::{MomentumGrid, Potential, Regime};
use serde::{Deserialize, Serialize};

use crate::snapshot::Snapshot;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl ConfigError {
    fn field(path: &str, message: impl std::fmt::Display) -> Self {
        ConfigError::Field {
            path: path.to_owned(),
            message: message.to_string(),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "J", default = "one")]
    pub j: f64,
    pub dim: usize,
    pub grid_sizes: Vec<usize>,
}

/// Broadening width: `"auto"` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawEta", into = "RawEta")]
pub enum EtaSpec {
    #[default]
    Auto,
    Value(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawEta {
    Number(f64),
    Text(String),
}

impl TryFrom<RawEta> for EtaSpec {
    type Error = String;

    fn try_from(raw: RawEta) -> Result<Self, String> {
        match raw {
            RawEta::Number(v) => Ok(EtaSpec::Value(v)),
            RawEta::Text(s) if s == "auto" => Ok(EtaSpec::Auto),
            RawEta::Text(s) => Err(format!("expected \"auto\" or a number, got {s:?}")),
        }
    }
}

impl From<EtaSpec> for RawEta {
    fn from(eta: EtaSpec) -> Self {
        match eta {
            EtaSpec::Auto => RawEta::Text("auto".into()),
            EtaSpec::Value(v) => RawEta::Number(v),
        }
    }
}

/// Two-body potential for the weak regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// Momentum-independent; `opposite` defaults to `U`.
    Contact {
        #[serde(default)]
        same: f64,
        #[serde(default)]
        opposite: Option<f64>,
    },
    /// Explicit per-momentum tables in grid order.
    Table { same: Vec<f64>, opposite: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub regime: Regime,
    #[serde(default)]
    pub eta: EtaSpec,
    #[serde(default)]
    pub potential_spec: Option<PotentialSpec>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    /// Steps between snapshots; 0 disables them.
    #[serde(default)]
    pub snapshot_stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            snapshot_stride: 0,
        }
    }
}

fn available_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub kernel: KernelSection,
    pub init: ScenarioSpec,
    pub integrate: IntegratorConfig,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default = "available_threads")]
    pub threads: usize,
    /// Fallback seed for `ground_plus_noise` when the init omits one.
    #[serde(default)]
    pub seed: u64,
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    inject_seed(&mut value);
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Field {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text)
}

fn inject_seed(value: &mut serde_json::Value) {
    let seed = value
        .get("seed")
        .cloned()
        .unwrap_or(serde_json::Value::from(0u64));
    if let Some(init) = value.get_mut("init").and_then(|v| v.as_object_mut()) {
        if init.get("kind").and_then(|k| k.as_str()) == Some("ground_plus_noise")
            && !init.contains_key("seed")
        {
            init.insert("seed".into(), seed);
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let grid = self.grid()?;
        self.kernel_config(&grid)?;
        if let ScenarioSpec::CustomFile { path } = &self.init {
            if path.as_os_str().is_empty() {
                return Err(ConfigError::field("init.path", "must not be empty"));
            }
        } else {
            self.init
                .build(&grid)
                .map_err(|e| ConfigError::field("init", e))?;
        }
        self.integrate
            .validate()
            .map_err(|e| ConfigError::field("integrate", e))?;
        if self.threads == 0 {
            return Err(ConfigError::field("threads", "must be >= 1"));
        }
        let stride = self.output.snapshot_stride;
        if !stride.is_multiple_of(self.integrate.output_every) {
            return Err(ConfigError::field(
                "output.snapshot_stride",
                format!(
                    "must be a multiple of integrate.output_every ({})",
                    self.integrate.output_every
                ),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::new(self.model.u, self.model.j, self.model.dim)
            .map_err(|e| ConfigError::field("model", e))
    }

    pub fn grid(&self) -> Result<MomentumGrid, ConfigError> {
        let params = self.params()?;
        build_grid(params, &self.model.grid_sizes).map_err(|e| match e {
            CoreError::GridTooSmall { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::GridTooLarge { .. } => ConfigError::field("model.grid_sizes", e),
            other => ConfigError::field("model", other),
        })
    }

    pub fn kernel_config(&self, grid: &MomentumGrid) -> Result<KernelConfig, ConfigError> {
        let eta = match self.kernel.eta {
            EtaSpec::Auto => default_eta(grid),
            EtaSpec::Value(v) => v,
        };
        let mut config = KernelConfig::new(self.kernel.regime, eta)
            .map_err(|e| ConfigError::field("kernel.eta", e))?;
        if let Some(spec) = &self.kernel.potential_spec {
            let potential = match spec {
                PotentialSpec::Contact { same, opposite } => Potential {
                    same: vec![*same; grid.len()],
                    opposite: vec![opposite.unwrap_or(self.model.u); grid.len()],
                },
                PotentialSpec::Table { same, opposite } => Potential {
                    same: same.clone(),
                    opposite: opposite.clone(),
                },
            };
            potential
                .validate(grid)
                .map_err(|e| ConfigError::field("kernel.potential_spec", e))?;
            config = config.with_potential(potential);
        }
        Ok(config)
    }

    /// Builds the initial state, reading the snapshot for `custom_file`.
    pub fn initial_state(&self, grid: &MomentumGrid) -> Result<DistributionState, ConfigError> {
        match &self.init {
            ScenarioSpec::CustomFile { path } => {
                let snapshot =
                    Snapshot::read(path).map_err(|e| ConfigError::field("init.path", e))?;
                snapshot
                    .into_state(grid)
                    .map_err(|e| ConfigError::field("init.path", e))
            }
            spec => spec.build(grid).map_err(|e| ConfigError::field("init", e)),
        }
    }
}
