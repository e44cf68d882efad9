//! Single-axis admittance controller.
//!
//! The controller renders a virtual mass `m_v` and virtual damping `c_v`:
//! the measured interaction force drives the reference model
//! `f = m_v * dv/dt + c_v * v`, and its velocity `v` becomes the platform
//! velocity command. The model is advanced with the forward-Euler recurrence
//!
//! ```text
//! v(k) = (f(k) - c_v * v(k-1)) / m_v * dt + v(k-1)
//! ```
//!
//! which is stable for `dt < 2 * m_v / c_v`.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Virtual mass and damping rendered by the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmittanceParams {
    /// Virtual mass in kg.
    pub virtual_mass: f64,
    /// Virtual damping in N·s/m.
    pub virtual_damping: f64,
}

impl Default for AdmittanceParams {
    /// 8 kg and 4 N·s/m, the experimentally tuned values of the reference device.
    fn default() -> Self {
        Self {
            virtual_mass: 8.0,
            virtual_damping: 4.0,
        }
    }
}

impl AdmittanceParams {
    pub fn new(virtual_mass: f64, virtual_damping: f64) -> Result<Self, ParamError> {
        let params = Self {
            virtual_mass,
            virtual_damping,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.virtual_mass.is_finite() && self.virtual_mass > 0.0) {
            return Err(ParamError::new("virtual_mass", "must be finite and > 0"));
        }
        if !(self.virtual_damping.is_finite() && self.virtual_damping >= 0.0) {
            return Err(ParamError::new("virtual_damping", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Response time constant `m_v / c_v`, infinite for a pure virtual mass.
    pub fn time_constant(&self) -> f64 {
        if self.virtual_damping == 0.0 {
            f64::INFINITY
        } else {
            self.virtual_mass / self.virtual_damping
        }
    }

    /// Steady-state velocity per unit force, `1 / c_v`.
    pub fn dc_gain(&self) -> f64 {
        if self.virtual_damping == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.virtual_damping
        }
    }

    /// Checks the forward-Euler stability bound `dt < 2 m_v / c_v`.
    pub fn check_step(&self, dt: f64) -> Result<(), ParamError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ParamError::new("dt", "must be finite and > 0"));
        }
        if self.virtual_damping > 0.0 && dt >= 2.0 * self.virtual_mass / self.virtual_damping {
            return Err(ParamError::new(
                "admittance",
                format!(
                    "unstable discretization: dt = {dt} s is not below 2*m_v/c_v = {} s",
                    2.0 * self.virtual_mass / self.virtual_damping
                ),
            ));
        }
        Ok(())
    }
}

/// Integrator state of one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAdmittanceState {
    /// Desired velocity from the previous step, m/s.
    pub desired_velocity: f64,
    /// Symmetric clamp on the desired velocity, m/s. `None` disables it.
    pub saturation_limit: Option<f64>,
}

impl AxisAdmittanceState {
    pub fn new(saturation_limit: Option<f64>) -> Self {
        Self {
            desired_velocity: 0.0,
            saturation_limit,
        }
    }

    /// Zeroes the integrator, keeping the saturation limit.
    #[must_use]
    pub fn reset(self) -> Self {
        Self {
            desired_velocity: 0.0,
            ..self
        }
    }

    fn clamp(&self, v: f64) -> f64 {
        match self.saturation_limit {
            Some(limit) => v.clamp(-limit, limit),
            None => v,
        }
    }
}

/// Returned when a step is refused; the caller keeps the previous state.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("non-finite admittance input (force {force} N, dt {dt} s)")]
pub struct AdmittanceFault {
    pub force: f64,
    pub dt: f64,
}

/// Advances the reference model by one sample.
///
/// The clamp is applied to the stored state, so a saturated integrator never
/// winds up past the limit.
pub fn step_admittance(
    params: &AdmittanceParams,
    state: AxisAdmittanceState,
    force: f64,
    dt: f64,
) -> Result<AxisAdmittanceState, AdmittanceFault> {
    if !force.is_finite() || !dt.is_finite() || dt <= 0.0 {
        return Err(AdmittanceFault { force, dt });
    }
    let prev = state.desired_velocity;
    let next = (force - params.virtual_damping * prev) / params.virtual_mass * dt + prev;
    Ok(AxisAdmittanceState {
        desired_velocity: state.clamp(next),
        ..state
    })
}

/// Continuous-time velocity response to a constant force applied from rest.
///
/// `v(t) = F/c_v * (1 - exp(-c_v t / m_v))`, or `F t / m_v` when `c_v = 0`.
pub fn analytic_step_response(params: &AdmittanceParams, force: f64, t: f64) -> f64 {
    let t = t.max(0.0);
    if params.virtual_damping == 0.0 {
        return force * t / params.virtual_mass;
    }
    let c = params.virtual_damping;
    force / c * -(-c * t / params.virtual_mass).exp_m1()
}

/// Stateful convenience wrapper owning the parameters and one axis state.
#[derive(Debug, Clone)]
pub struct AdmittanceController {
    params: AdmittanceParams,
    state: AxisAdmittanceState,
    faults: u64,
}

impl AdmittanceController {
    /// Fails when the parameters are invalid or `dt` violates the stability bound.
    pub fn new(
        params: AdmittanceParams,
        saturation_limit: Option<f64>,
        dt: f64,
    ) -> Result<Self, ParamError> {
        params.validate()?;
        params.check_step(dt)?;
        if let Some(limit) = saturation_limit {
            if !(limit.is_finite() && limit > 0.0) {
                return Err(ParamError::new("saturation_limit", "must be finite and > 0"));
            }
        }
        Ok(Self {
            params,
            state: AxisAdmittanceState::new(saturation_limit),
            faults: 0,
        })
    }

    pub fn params(&self) -> &AdmittanceParams {
        &self.params
    }

    pub fn state(&self) -> AxisAdmittanceState {
        self.state
    }

    pub fn desired_velocity(&self) -> f64 {
        self.state.desired_velocity
    }

    /// Number of refused steps since construction.
    pub fn faults(&self) -> u64 {
        self.faults
    }

    /// Steps the model; on a fault the previous command is held and returned.
    pub fn update(&mut self, force: f64, dt: f64) -> f64 {
        match step_admittance(&self.params, self.state, force, dt) {
            Ok(next) => self.state = next,
            Err(_) => self.faults += 1,
        }
        self.state.desired_velocity
    }

    pub fn reset(&mut self) {
        self.state = self.state.reset();
    }
}
