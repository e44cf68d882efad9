//! Actuator requirements for a synthetic 1.2 m/s gait, checked against the motor catalog.

use gaitforge::gaitgen::{check_spec, generate_gait, required_actuation, GaitParams, MotorCatalog, DEFAULT_CARRIED_MASS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = GaitParams::default();
    let catalog = MotorCatalog::default();
    let traj = generate_gait(&params, 3.0 * params.cycle_time(), 0.001)?;
    println!(
        "cycle {:.3} s, cadence {:.2} steps/s, peak swing {:.2} m/s",
        params.cycle_time(),
        params.cadence(),
        params.peak_swing_speed()
    );
    for user_mass in [47.0, 70.0, 90.0] {
        let req = required_actuation(&traj, user_mass, DEFAULT_CARRIED_MASS, &catalog)?;
        let report = check_spec(&req, &catalog);
        println!(
            "{user_mass:>4} kg  x {:>6.2} N·m {:>5.0} RPM | z {:>6.2} N·m {:>5.0} RPM  {}",
            req.x.peak_motor_torque,
            req.x.peak_motor_speed,
            req.z.peak_motor_torque,
            req.z.peak_motor_speed,
            if report.pass() { "pass" } else { "fail" }
        );
    }
    Ok(())
}
