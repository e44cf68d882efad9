//! Virtual mass by virtual damping sweep with the oscillation metric.

use gaitforge::cli::{run_sweep, SweepGrid};
use gaitforge::runtime::ScenarioConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = ScenarioConfig::default();
    base.loop_config.duration = 8.0;
    let grid = SweepGrid {
        virtual_mass: vec![0.25, 1.0, 2.0, 8.0, 16.0],
        virtual_damping: vec![0.5, 4.0, 64.0],
    };
    for r in run_sweep(&base, &grid)? {
        match r.metrics() {
            Some(m) => println!(
                "m_v {:>5} c_v {:>5}  peak {:>5.1} N  ratio {:>8.2}  {}",
                r.virtual_mass,
                r.virtual_damping,
                m.peak_swing_force,
                m.oscillation.ratio,
                if m.oscillation.oscillatory { "oscillatory" } else { "ok" }
            ),
            None => println!("m_v {:>5} c_v {:>5}  skipped: {:?}", r.virtual_mass, r.virtual_damping, r.outcome),
        }
    }
    Ok(())
}
