use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{GaitGenError, ParamError};
use crate::planar::{Axis, Planar};

/// Mass of one foot-platform carriage assembly assumed when none is given, kg.
pub const DEFAULT_CARRIED_MASS: f64 = 15.0;

/// Ramp applied to the stance weight after touchdown and before lift-off, s.
pub const WEIGHT_RAMP_TIME: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorSpec {
    /// Continuous torque at the gearbox output, N·m.
    pub rated_torque_after_gear: f64,
    /// Peak torque at the gearbox output, N·m.
    pub momentary_max_torque: f64,
    /// Gearbox output speed limit, RPM.
    pub max_speed_after_gear: f64,
    pub gear_ratio: f64,
    /// Actuator force per unit of output torque, N per N·m.
    pub transmission_factor: f64,
}

impl MotorSpec {
    /// Horizontal axis of the reference device.
    pub fn table_x() -> Self {
        Self {
            rated_torque_after_gear: 19.11,
            momentary_max_torque: 57.3,
            max_speed_after_gear: 1667.0,
            gear_ratio: 3.0,
            transmission_factor: 932.2 / 19.11,
        }
    }

    /// Vertical axis of the reference device.
    pub fn table_z() -> Self {
        Self {
            rated_torque_after_gear: 63.7,
            momentary_max_torque: 191.0,
            max_speed_after_gear: 500.0,
            gear_ratio: 10.0,
            transmission_factor: 1676.3 / 63.7,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (key, v) in [
            ("rated_torque_after_gear", self.rated_torque_after_gear),
            ("momentary_max_torque", self.momentary_max_torque),
            ("max_speed_after_gear", self.max_speed_after_gear),
            ("gear_ratio", self.gear_ratio),
            ("transmission_factor", self.transmission_factor),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ParamError::new(key, "must be finite and > 0"));
            }
        }
        if self.momentary_max_torque < self.rated_torque_after_gear {
            return Err(ParamError::new(
                "momentary_max_torque",
                "must be at least the rated torque",
            ));
        }
        Ok(())
    }

    /// Output torque needed for an actuator force.
    pub fn torque_for_force(&self, force: f64) -> f64 {
        force / self.transmission_factor
    }

    /// Gearbox output speed for a linear speed, RPM.
    pub fn rpm_for_speed(&self, speed: f64) -> f64 {
        speed * self.transmission_factor * 60.0 / (2.0 * std::f64::consts::PI)
    }

    /// Peak actuator force the momentary torque can produce, N.
    pub fn available_force(&self) -> f64 {
        self.momentary_max_torque * self.transmission_factor
    }

    /// Motor shaft speed corresponding to an output speed, RPM.
    pub fn motor_shaft_rpm(&self, output_rpm: f64) -> f64 {
        output_rpm * self.gear_ratio
    }

    /// The same motor behind a different gearbox: output torques scale with
    /// the ratio and the output speed limit inversely.
    pub fn with_gear_ratio(&self, gear_ratio: f64) -> Self {
        let k = gear_ratio / self.gear_ratio;
        Self {
            rated_torque_after_gear: self.rated_torque_after_gear * k,
            momentary_max_torque: self.momentary_max_torque * k,
            max_speed_after_gear: self.max_speed_after_gear / k,
            gear_ratio,
            transmission_factor: self.transmission_factor,
        }
    }
}

/// Motor selection for both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotorCatalog {
    pub x: MotorSpec,
    pub z: MotorSpec,
}

impl Default for MotorCatalog {
    fn default() -> Self {
        Self {
            x: MotorSpec::table_x(),
            z: MotorSpec::table_z(),
        }
    }
}

impl MotorCatalog {
    pub fn get(&self, axis: Axis) -> &MotorSpec {
        match axis {
            Axis::X => &self.x,
            Axis::Z => &self.z,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.x.validate().map_err(|e| e.under("x"))?;
        self.z.validate().map_err(|e| e.under("z"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AxisRequirement {
    pub peak_force: f64,
    pub peak_motor_torque: f64,
    /// Gearbox output speed, RPM.
    pub peak_motor_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ActuationRequirement {
    pub x: AxisRequirement,
    pub z: AxisRequirement,
}

impl ActuationRequirement {
    pub fn get(&self, axis: Axis) -> &AxisRequirement {
        match axis {
            Axis::X => &self.x,
            Axis::Z => &self.z,
        }
    }
}

/// Ramp factor of the stance weight per sample for one foot.
fn weight_ramps(stance: &[bool], times: &[f64]) -> Vec<f64> {
    let n = stance.len();
    let mut since = vec![f64::INFINITY; n];
    let mut last_land: Option<f64> = None;
    for i in 0..n {
        if stance[i] && (i > 0 && !stance[i - 1]) {
            last_land = Some(times[i]);
        }
        if stance[i] {
            since[i] = last_land.map_or(f64::INFINITY, |t0| times[i] - t0);
        }
    }
    let mut until = vec![f64::INFINITY; n];
    let mut next_lift: Option<f64> = None;
    for i in (0..n).rev() {
        if !stance[i] {
            next_lift = Some(times[i]);
        } else {
            until[i] = next_lift.map_or(f64::INFINITY, |t1| t1 - times[i]);
        }
    }
    (0..n)
        .map(|i| {
            if !stance[i] {
                0.0
            } else {
                (since[i] / WEIGHT_RAMP_TIME).min(until[i] / WEIGHT_RAMP_TIME).min(1.0)
            }
        })
        .collect()
}

/// Peak force, output torque and output speed per axis over a trajectory.
///
/// Each axis carries `carried_mass * a`; the vertical axis additionally bears
/// the user's full weight whenever its foot is in stance, ramped in and out.
pub fn required_actuation(
    traj: &Trajectory,
    user_mass: f64,
    carried_mass: f64,
    motors: &MotorCatalog,
) -> Result<ActuationRequirement, GaitGenError> {
    if traj.samples.is_empty() {
        return Err(GaitGenError::Empty);
    }
    if !traj.has_acceleration() {
        return Err(GaitGenError::MissingAcceleration);
    }
    if !(user_mass.is_finite() && user_mass >= 0.0) {
        return Err(ParamError::new("user_mass", "must be finite and >= 0").into());
    }
    if !(carried_mass.is_finite() && carried_mass >= 0.0) {
        return Err(ParamError::new("carried_mass", "must be finite and >= 0").into());
    }
    motors.validate()?;
    let weight = user_mass * 9.81;
    let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let mut req = ActuationRequirement::default();
    for foot in 0..2 {
        let stance: Vec<bool> = traj.samples.iter().map(|s| s.feet[foot].stance).collect();
        let ramps = weight_ramps(&stance, &times);
        for (sample, ramp) in traj.samples.iter().zip(ramps) {
            let f = &sample.feet[foot];
            let a = f.acceleration.unwrap_or(Planar::ZERO);
            let force = Planar::new(carried_mass * a.x, carried_mass * a.z + weight * ramp);
            for axis in Axis::BOTH {
                let spec = motors.get(axis);
                let r = match axis {
                    Axis::X => &mut req.x,
                    Axis::Z => &mut req.z,
                };
                let fa = force.get(axis).abs();
                r.peak_force = r.peak_force.max(fa);
                r.peak_motor_torque = r.peak_motor_torque.max(spec.torque_for_force(fa));
                r.peak_motor_speed = r.peak_motor_speed.max(spec.rpm_for_speed(f.velocity.get(axis).abs()));
            }
        }
    }
    Ok(req)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisMargin {
    pub torque_required: f64,
    pub torque_available: f64,
    pub speed_required: f64,
    pub speed_available: f64,
    pub torque_pass: bool,
    pub speed_pass: bool,
}

impl AxisMargin {
    /// Available over required torque; infinite when nothing is required.
    pub fn torque_margin(&self) -> f64 {
        self.torque_available / self.torque_required
    }

    pub fn speed_margin(&self) -> f64 {
        self.speed_available / self.speed_required
    }

    pub fn pass(&self) -> bool {
        self.torque_pass && self.speed_pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginReport {
    pub x: AxisMargin,
    pub z: AxisMargin,
}

impl MarginReport {
    pub fn pass(&self) -> bool {
        self.x.pass() && self.z.pass()
    }

    pub fn get(&self, axis: Axis) -> &AxisMargin {
        match axis {
            Axis::X => &self.x,
            Axis::Z => &self.z,
        }
    }
}

pub fn check_axis(req: &AxisRequirement, spec: &MotorSpec) -> AxisMargin {
    AxisMargin {
        torque_required: req.peak_motor_torque,
        torque_available: spec.momentary_max_torque,
        speed_required: req.peak_motor_speed,
        speed_available: spec.max_speed_after_gear,
        torque_pass: req.peak_motor_torque <= spec.momentary_max_torque,
        speed_pass: req.peak_motor_speed <= spec.max_speed_after_gear,
    }
}

pub fn check_spec(req: &ActuationRequirement, motors: &MotorCatalog) -> MarginReport {
    MarginReport {
        x: check_axis(&req.x, &motors.x),
        z: check_axis(&req.z, &motors.z),
    }
}
