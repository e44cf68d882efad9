//! Fixed-rate control loop, telemetry and loop metrics.

mod metrics;
mod scenario;
mod telemetry;

pub use metrics::{
    axis_step_response, jitter_stats, measure_loop_delay, swing_force_envelope, swing_tracking,
    DelayStats, ForceEnvelope, JitterStats, StepResponse, TrackingStats,
};
pub use scenario::{
    run_scenario, BridgeConfig, LoopConfig, LoopMode, ScenarioConfig, Simulation, TickTiming,
    WalkConfig, WalkModeKind,
};
pub use telemetry::{
    contact_events, csv_header, CsvTelemetryWriter, FootTelemetry, FrameRing, RunStats,
    TelemetryFrame, TelemetryLog, TelemetryTap, WalkTelemetry, CSV_SCHEMA,
};
