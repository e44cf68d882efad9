//! Uphill walk: slope detection and vertical compensation.

use gaitforge::gait::ContactKind;
use gaitforge::runtime::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScenarioConfig::incline(0.4);
    let log = run_scenario(&cfg)?;
    println!("{:>7} {:>5} {:>10} {:>10} {:>8}", "t (s)", "foot", "step z", "avatar z", "slope");
    for e in log.events.iter().filter(|e| e.kind == ContactKind::HeelStrike) {
        let tick = (e.time * log.rate).round() as usize;
        let f = &log.frames[tick];
        println!(
            "{:>7.3} {:>5} {:>10.4} {:>10.4} {:>8.3}",
            e.time,
            e.foot,
            f.feet[e.foot.index()].ground_z,
            -f.walk.d_z,
            f.walk.slope
        );
    }
    let last = log.frames.last().expect("non-empty run").walk;
    println!("travel d_x = {:.3} m, d_z = {:.3} m, ratio {:.6}", last.d_x, last.d_z, last.d_z / last.d_x);
    Ok(())
}
