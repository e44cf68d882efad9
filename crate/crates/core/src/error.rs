use thiserror::Error;

/// A parameter that violates its invariant, tagged with the key that holds it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{key}: {message}")]
pub struct ParamError {
    pub key: String,
    pub message: String,
}

impl ParamError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Prefixes the key with a parent path, e.g. `virtual_mass` -> `admittance.virtual_mass`.
    pub fn under(mut self, parent: &str) -> Self {
        self.key = if self.key.is_empty() {
            parent.to_string()
        } else {
            format!("{parent}.{}", self.key)
        };
        self
    }
}

#[derive(Debug, Error)]
pub enum GaitGenError {
    #[error("invalid gait parameter: {0}")]
    Param(#[from] ParamError),
    #[error("swing speed {speed:.3} m/s exceeds the physical cap of {cap:.3} m/s")]
    SwingTooFast { speed: f64, cap: f64 },
    #[error("duration {duration} s covers fewer than two gait cycles of {cycle} s")]
    TooShort { duration: f64, cycle: f64 },
    #[error("trajectory has no acceleration channels")]
    MissingAcceleration,
    #[error("trajectory is empty")]
    Empty,
    #[error("trajectory csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario validation failed: {0}")]
    Invalid(#[from] ParamError),
    #[error("bridge: {0}")]
    Bridge(#[from] crate::bridge::BridgeError),
}

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error("telemetry log is empty")]
    Empty,
    #[error("telemetry log needs at least {0} frames")]
    TooShort(usize),
    #[error("unknown export kind `{0}`; valid kinds: trajectory-force, velocity-tracking, travel")]
    UnknownKind(String),
    #[error("telemetry csv: {0}")]
    Format(String),
    #[error("plot: {0}")]
    Plot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
