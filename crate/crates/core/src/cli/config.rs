use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use thiserror::Error;

use crate::error::ParamError;
use crate::runtime::{LoopMode, ScenarioConfig, WalkModeKind};
use crate::terrain::TerrainProfile;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(String),
    /// A key that does not belong in the tree or holds a value of the wrong type.
    #[error("{path}: {message}")]
    Key { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] ParamError),
    #[error("config serialization: {0}")]
    Serialize(String),
}

impl ConfigError {
    /// Dotted key path the error refers to, when there is one.
    pub fn key_path(&self) -> Option<&str> {
        match self {
            ConfigError::Key { path, .. } => Some(path),
            ConfigError::Invalid(e) => Some(&e.key),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TerrainKind {
    Flat,
    Stair,
    Uneven,
    External,
}

/// Scenario flags shared by the subcommands. Every flag overrides the
/// corresponding key of the config file, which in turn overrides the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// TOML scenario file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub terrain: Option<TerrainKind>,
    /// Incline for `--terrain stair`.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: Option<f64>,
    /// Ground height for `--terrain flat`, m.
    #[arg(long, allow_hyphen_values = true)]
    pub height: Option<f64>,
    /// Comma-separated footstep heights for `--terrain uneven`, m.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub step_heights: Option<Vec<f64>>,
    /// Fixed stance speed, m/s. Selects fixed-speed walking.
    #[arg(long, conflicts_with = "dynamic")]
    pub speed: Option<f64>,
    /// Estimate walking speed from the ground reaction force.
    #[arg(long)]
    pub dynamic: bool,
    #[arg(long)]
    pub virtual_mass: Option<f64>,
    #[arg(long)]
    pub virtual_damping: Option<f64>,
    /// Control rate, Hz.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Simulated duration, s.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub wall_clock: bool,
    #[arg(long)]
    pub delay_cycles: Option<usize>,
    /// Walker mass, kg.
    #[arg(long)]
    pub user_mass: Option<f64>,
}

/// Parses a TOML scenario tree. Missing keys take their defaults; unknown
/// keys are rejected with their full path.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Key {
        path: e.path().to_string(),
        message: e.inner().message().to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn config_to_toml(config: &ScenarioConfig) -> Result<String, ConfigError> {
    toml::to_string_pretty(config).map_err(|e| ConfigError::Serialize(e.to_string()))
}

/// Applies flag overrides on top of `base`.
pub fn apply_overrides(mut cfg: ScenarioConfig, args: &ScenarioArgs) -> ScenarioConfig {
    if let Some(kind) = args.terrain {
        cfg.terrain = match kind {
            TerrainKind::Flat => TerrainProfile::Flat {
                height: args.height.unwrap_or(0.0),
            },
            TerrainKind::Stair => TerrainProfile::Stair {
                slope: args.slope.unwrap_or(0.0),
            },
            TerrainKind::Uneven => TerrainProfile::Uneven {
                step_heights: args.step_heights.clone().unwrap_or_else(|| vec![0.0]),
            },
            TerrainKind::External => TerrainProfile::external(),
        };
    } else {
        match &mut cfg.terrain {
            TerrainProfile::Flat { height } => *height = args.height.unwrap_or(*height),
            TerrainProfile::Stair { slope } => *slope = args.slope.unwrap_or(*slope),
            TerrainProfile::Uneven { step_heights } => {
                if let Some(h) = &args.step_heights {
                    step_heights.clone_from(h);
                }
            }
            TerrainProfile::External { .. } => {}
        }
    }
    if let Some(v) = args.speed {
        cfg.walk.mode = WalkModeKind::Fixed;
        cfg.walk.fixed_speed = v;
        cfg.human.intent.speed = v;
    }
    if args.dynamic {
        cfg.walk.mode = WalkModeKind::Dynamic;
    }
    if let Some(m) = args.virtual_mass {
        cfg.admittance.virtual_mass = m;
    }
    if let Some(c) = args.virtual_damping {
        cfg.admittance.virtual_damping = c;
    }
    if let Some(r) = args.rate {
        cfg.loop_config.rate = r;
    }
    if let Some(d) = args.duration {
        cfg.loop_config.duration = d;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.wall_clock {
        cfg.loop_config.mode = LoopMode::WallClock;
    }
    if let Some(n) = args.delay_cycles {
        cfg.loop_config.delay_cycles = n;
    }
    if let Some(m) = args.user_mass {
        cfg.human.user_mass = m;
    }
    cfg
}

/// Config file (if any) merged with flag overrides, then validated.
pub fn parse_and_validate(args: &ScenarioArgs) -> Result<ScenarioConfig, ConfigError> {
    let base = match &args.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    let cfg = apply_overrides(base, args);
    cfg.validate()?;
    Ok(cfg)
}
