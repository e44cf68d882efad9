//! Synthetic gait trajectories and actuator sizing by inverse dynamics.

mod shape;
mod sizing;
mod trajectory;

pub use shape::SwingShape;
pub use sizing::{
    check_axis, check_spec, required_actuation, ActuationRequirement, AxisMargin, AxisRequirement,
    MarginReport, MotorCatalog, MotorSpec, DEFAULT_CARRIED_MASS, WEIGHT_RAMP_TIME,
};
pub use trajectory::{
    generate_gait, ramp_fraction_for_peak, FootSample, GaitParams, Trajectory, TrajectorySample,
};
