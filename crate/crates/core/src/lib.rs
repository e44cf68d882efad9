//! Simulated control stack of a two-platform locomotion interface.
//!
//! Each foot rides a planar gantry. In swing the platform follows the user's
//! foot through an admittance controller; in stance it renders virtual ground,
//! sliding backward at the estimated walking speed along the terrain slope.
//! A synthetic walker, force sensors and first-order actuators close the loop
//! so the whole stack can be run and tested without hardware.
//!
//! ```no_run
//! use gaitforge::runtime::{run_scenario, ScenarioConfig};
//!
//! let log = run_scenario(&ScenarioConfig::default()).unwrap();
//! println!("{} frames, {} contact events", log.frames.len(), log.events.len());
//! ```

pub mod admittance;
pub mod bridge;
pub mod cli;
pub mod error;
pub mod gait;
pub mod gaitgen;
pub mod planar;
pub mod plant;
pub mod runtime;
pub mod terrain;
