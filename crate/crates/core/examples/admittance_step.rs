//! Discrete admittance law against its closed-form step response.

use gaitforge::admittance::{analytic_step_response, AdmittanceController, AdmittanceParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = AdmittanceParams::default();
    let dt = 0.001;
    let force = 4.0;
    let mut ctl = AdmittanceController::new(params, None, dt)?;
    println!("m_v = {} kg, c_v = {} N·s/m, tau = {} s", params.virtual_mass, params.virtual_damping, params.time_constant());
    println!("{:>6} {:>10} {:>10} {:>10}", "t (s)", "discrete", "analytic", "rel err");
    let ticks = (5.0 * params.time_constant() / dt).round() as usize;
    for k in 1..=ticks {
        let v = ctl.update(force, dt);
        if k % 1000 == 0 {
            let t = k as f64 * dt;
            let exact = analytic_step_response(&params, force, t);
            println!("{t:>6.1} {v:>10.6} {exact:>10.6} {:>10.2e}", (v - exact).abs() / exact);
        }
    }
    println!("settles toward F/c_v = {:.3} m/s", force * params.dc_gain());
    Ok(())
}
