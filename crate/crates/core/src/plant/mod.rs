//! Simulated gantry, force sensor and synthetic walker.

mod axis;
mod human;
mod sensor;

pub use axis::{step_axis, AxisParams, GantryAxis};
pub use human::{
    human_force, impedance_force, HumanModel, HumanParams, IntentProfile, MAX_USER_MASS,
};
pub use sensor::{sense_force, ForceSensor, ForceSensorModel};

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Parameters shared by the four gantry axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantParams {
    pub lag_time_constant: f64,
    /// Actuator speed clamp, also applied to admittance commands, m/s.
    pub velocity_limit: f64,
    /// Horizontal travel `(min, max)`, m.
    pub x_limits: (f64, f64),
    /// Vertical travel `(min, max)`, m.
    pub z_limits: (f64, f64),
    pub sensor: ForceSensorModel,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            lag_time_constant: 0.005,
            velocity_limit: 1.0,
            x_limits: (-0.5, 0.5),
            z_limits: (-0.2, 0.3),
            sensor: ForceSensorModel::default(),
        }
    }
}

impl PlantParams {
    pub fn axis(&self, limits: (f64, f64), command_delay: usize) -> AxisParams {
        AxisParams {
            lag_time_constant: self.lag_time_constant,
            command_delay,
            travel_limits: limits,
            velocity_limit: self.velocity_limit,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.axis(self.x_limits, 0).validate().map_err(|e| {
            if e.key == "travel_limits" {
                ParamError::new("x_limits", e.message)
            } else {
                e
            }
        })?;
        self.axis(self.z_limits, 0).validate().map_err(|e| {
            if e.key == "travel_limits" {
                ParamError::new("z_limits", e.message)
            } else {
                e
            }
        })?;
        self.sensor.validate().map_err(|e| e.under("sensor"))
    }
}
