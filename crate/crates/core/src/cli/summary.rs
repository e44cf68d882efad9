use std::fmt;

use serde::Serialize;

use crate::runtime::{
    measure_loop_delay, swing_force_envelope, swing_tracking, DelayStats, ForceEnvelope, RunStats, TelemetryLog,
    TrackingStats, WalkTelemetry,
};

/// Headline figures of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub duration: f64,
    pub ticks: usize,
    pub heel_strikes: usize,
    pub toe_offs: usize,
    pub tracking: TrackingStats,
    pub force: ForceEnvelope,
    pub delay: Option<DelayStats>,
    pub limit_ticks: usize,
    pub final_walk: Option<WalkTelemetry>,
    pub stats: RunStats,
}

pub fn summarize(log: &TelemetryLog) -> RunSummary {
    use crate::gait::ContactKind;
    let count = |k| log.events.iter().filter(|e| e.kind == k).count();
    RunSummary {
        duration: log.frames.len() as f64 / log.rate.max(f64::MIN_POSITIVE),
        ticks: log.frames.len(),
        heel_strikes: count(ContactKind::HeelStrike),
        toe_offs: count(ContactKind::ToeOff),
        tracking: swing_tracking(log, 0.1, 0.1),
        force: swing_force_envelope(log, 40.0),
        delay: measure_loop_delay(log).ok(),
        limit_ticks: log.frames.iter().filter(|f| f.feet.iter().any(|ft| ft.limit)).count(),
        final_walk: log.frames.last().map(|f| f.walk),
        stats: log.stats,
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "duration        {:.3} s ({} ticks)", self.duration, self.ticks)?;
        writeln!(f, "steps           {} heel strikes, {} toe-offs", self.heel_strikes, self.toe_offs)?;
        writeln!(
            f,
            "swing tracking  {:.1}% within 0.1 m/s, rms {:.4} m/s",
            100.0 * self.tracking.within,
            self.tracking.rms
        )?;
        writeln!(
            f,
            "swing force     peak {:.1} N, {:.1}% <= {:.0} N",
            self.force.peak,
            100.0 * self.force.fraction_typical,
            self.force.typical
        )?;
        if let Some(d) = &self.delay {
            writeln!(f, "loop delay      mean {:.3} ms, max {:.3} ms", d.mean * 1e3, d.max * 1e3)?;
        }
        writeln!(f, "limit ticks     {}", self.limit_ticks)?;
        if let Some(w) = &self.final_walk {
            writeln!(
                f,
                "final walk      v {:.3} m/s, avatar ({:.3}, {:.3}) m, slope {:.3}",
                w.walk_velocity, -w.d_x + 0.0, -w.d_z + 0.0, w.slope
            )?;
        }
        write!(f, "faults          {:?}", self.stats)
    }
}
