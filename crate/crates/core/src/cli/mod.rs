//! Scenario configuration, parameter sweeps and figure export behind the
//! `gaitforge` binary.

mod config;
mod export;
mod summary;
mod sweep;

pub use config::{
    apply_overrides, config_to_toml, load_config, parse_and_validate, parse_config_str, ConfigError, ScenarioArgs,
    TerrainKind,
};
pub use export::{export, ExportKind, ExportedFiles, EXPORT_RATE};
pub use summary::{summarize, RunSummary};
pub use sweep::{
    oscillation_metric, run_sweep, steady_state_gain, CellMetrics, CellOutcome, CellReport, OscillationMetric,
    SweepGrid, OSCILLATION_CUTOFF_HZ, OSCILLATION_RATIO,
};
pub use crate::runtime::ScenarioConfig;
