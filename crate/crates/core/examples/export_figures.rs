//! CSV and SVG figure data for a flat walk and an uphill walk.

use std::path::PathBuf;

use gaitforge::cli::{export, ExportKind};
use gaitforge::runtime::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("gaitforge-figures"), PathBuf::from);
    let flat = run_scenario(&ScenarioConfig::default())?;
    let uphill = run_scenario(&ScenarioConfig::incline(0.4))?;
    for (log, kind, stem) in [
        (&flat, ExportKind::TrajectoryForce, "flat-trajectory-force"),
        (&flat, ExportKind::VelocityTracking, "flat-velocity-tracking"),
        (&uphill, ExportKind::Travel, "uphill-travel"),
    ] {
        let files = export(log, kind, &out, stem)?;
        println!("{kind:<18} {} {}", files.csv.display(), files.plot.display());
    }
    Ok(())
}
