use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Static parameters of one gantry axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisParams {
    /// Inner velocity-loop time constant, s.
    pub lag_time_constant: f64,
    /// Transport delay of velocity commands, ticks.
    pub command_delay: usize,
    /// Travel range `(min, max)`, m.
    pub travel_limits: (f64, f64),
    /// Actuator speed clamp, m/s.
    pub velocity_limit: f64,
}

impl AxisParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.lag_time_constant.is_finite() && self.lag_time_constant > 0.0) {
            return Err(ParamError::new("lag_time_constant", "must be finite and > 0"));
        }
        let (lo, hi) = self.travel_limits;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ParamError::new("travel_limits", "must be finite with min < max"));
        }
        if !(self.velocity_limit.is_finite() && self.velocity_limit > 0.0) {
            return Err(ParamError::new("velocity_limit", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Simulated linear axis: transport delay, first-order velocity lag, speed and travel limits.
#[derive(Debug, Clone, PartialEq)]
pub struct GantryAxis {
    pub position: f64,
    pub velocity: f64,
    pub lag_time_constant: f64,
    pub command_delay: usize,
    pub travel_limits: (f64, f64),
    pub velocity_limit: f64,
    /// Commands in flight, oldest first. Always `command_delay` long between steps.
    pub delayed_command_queue: VecDeque<f64>,
    /// Set while the carriage sits on a limit switch.
    pub limit_switch: bool,
}

impl GantryAxis {
    pub fn new(params: &AxisParams, position: f64) -> Result<Self, ParamError> {
        params.validate()?;
        let (lo, hi) = params.travel_limits;
        if !(lo..=hi).contains(&position) {
            return Err(ParamError::new(
                "position",
                format!("initial position {position} m is outside [{lo}, {hi}]"),
            ));
        }
        Ok(Self {
            position,
            velocity: 0.0,
            lag_time_constant: params.lag_time_constant,
            command_delay: params.command_delay,
            travel_limits: params.travel_limits,
            velocity_limit: params.velocity_limit,
            delayed_command_queue: std::iter::repeat_n(0.0, params.command_delay).collect(),
            limit_switch: false,
        })
    }

    /// Advances the axis by one tick with a fresh velocity command.
    pub fn step(&mut self, v_cmd: f64, dt: f64) {
        self.delayed_command_queue.push_back(v_cmd);
        let delayed = self.delayed_command_queue.pop_front().unwrap_or(v_cmd);
        let alpha = (dt / self.lag_time_constant).min(1.0);
        let mut v = self.velocity + (delayed - self.velocity) * alpha;
        v = v.clamp(-self.velocity_limit, self.velocity_limit);
        let (lo, hi) = self.travel_limits;
        let mut x = self.position + v * dt;
        self.limit_switch = false;
        if x >= hi && v >= 0.0 {
            x = hi;
            v = 0.0;
            self.limit_switch = true;
        } else if x <= lo && v <= 0.0 {
            x = lo;
            v = 0.0;
            self.limit_switch = true;
        }
        self.position = x;
        self.velocity = v;
    }
}

/// Value-semantics form of [`GantryAxis::step`].
pub fn step_axis(mut axis: GantryAxis, v_cmd: f64, dt: f64) -> GantryAxis {
    axis.step(v_cmd, dt);
    axis
}
