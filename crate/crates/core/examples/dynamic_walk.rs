//! Walk start and stop with the ground-reaction velocity estimator.

use gaitforge::runtime::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScenarioConfig::dynamic_walk();
    let log = run_scenario(&cfg)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "t (s)", "intent", "v_x", "avatar x");
    for f in log.frames.iter().step_by(500) {
        let t = f.t();
        println!(
            "{t:>6.1} {:>10.3} {:>10.3} {:>10.3}",
            cfg.human.intent.speed_at(t),
            f.walk.walk_velocity,
            -f.walk.d_x
        );
    }
    Ok(())
}
