//! Fixed-speed walk on flat ground with the synthetic walker.

use gaitforge::cli::summarize;
use gaitforge::runtime::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ScenarioConfig::default();
    cfg.loop_config.duration = 12.0;
    let log = run_scenario(&cfg)?;
    println!("{}", summarize(&log));
    println!();
    for e in &log.events {
        println!("{:>7.3} s  foot {}  {:?} at x = {:+.3} m", e.time, e.foot, e.kind, e.position.x);
    }
    Ok(())
}
