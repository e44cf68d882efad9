use serde::Serialize;

use super::telemetry::TelemetryLog;
use super::LoopConfig;
use crate::error::{ParamError, TelemetryError};
use crate::gait::GaitPhase;
use crate::plant::{GantryAxis, PlantParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayStats {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Distribution of `T_end - T_start` over the frames that have both stamps, s.
pub fn measure_loop_delay(log: &TelemetryLog) -> Result<DelayStats, TelemetryError> {
    if log.frames.is_empty() {
        return Err(TelemetryError::Empty);
    }
    let delays: Vec<u64> = log
        .frames
        .iter()
        .filter_map(|f| f.t_start_ns.map(|s| f.t_end_ns.saturating_sub(s)))
        .collect();
    if delays.is_empty() {
        return Err(TelemetryError::TooShort(2));
    }
    let min = *delays.iter().min().unwrap_or(&0);
    let max = *delays.iter().max().unwrap_or(&0);
    let mean = delays.iter().map(|&d| d as f64).sum::<f64>() / delays.len() as f64;
    Ok(DelayStats {
        count: delays.len(),
        mean: mean * 1e-9,
        min: min as f64 * 1e-9,
        max: max as f64 * 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JitterStats {
    pub mean: f64,
    pub p99: f64,
    pub max: f64,
}

/// Deviation of successive tick timestamps from the nominal period, s.
pub fn jitter_stats(log: &TelemetryLog) -> Result<JitterStats, TelemetryError> {
    if log.frames.len() < 2 {
        return Err(TelemetryError::TooShort(2));
    }
    if !(log.rate > 0.0) {
        return Err(TelemetryError::Format("log has no tick rate".into()));
    }
    let period = (1e9 / log.rate).round() as i64;
    let mut dev: Vec<u64> = log
        .frames
        .windows(2)
        .map(|w| (w[1].t_end_ns as i64 - w[0].t_end_ns as i64 - period).unsigned_abs())
        .collect();
    dev.sort_unstable();
    let mean = dev.iter().map(|&d| d as f64).sum::<f64>() / dev.len() as f64;
    let p99_index = ((dev.len() as f64 * 0.99).ceil() as usize).clamp(1, dev.len()) - 1;
    Ok(JitterStats {
        mean: mean * 1e-9,
        p99: dev[p99_index] as f64 * 1e-9,
        max: dev[dev.len() - 1] as f64 * 1e-9,
    })
}

/// For each frame and foot, whether the sample is in swing and at least
/// `margin` seconds away from any phase change of that foot.
fn settled_swing_mask(log: &TelemetryLog, margin: f64) -> Vec<[bool; 2]> {
    let n = log.frames.len();
    let mut mask = vec![[false; 2]; n];
    for foot in 0..2 {
        let changes: Vec<f64> = log
            .frames
            .windows(2)
            .filter(|w| w[0].feet[foot].phase != w[1].feet[foot].phase)
            .map(|w| w[1].t())
            .collect();
        let mut next = 0;
        for (i, f) in log.frames.iter().enumerate() {
            if f.feet[foot].phase != GaitPhase::Swing {
                continue;
            }
            let t = f.t();
            while next < changes.len() && changes[next] < t - margin {
                next += 1;
            }
            let near = changes[next..].first().is_some_and(|&c| (c - t).abs() <= margin);
            mask[i][foot] = !near;
        }
    }
    mask
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackingStats {
    /// Swing samples considered.
    pub samples: usize,
    /// Fraction of samples with both axes within the tolerance.
    pub within: f64,
    /// RMS of the per-sample error magnitude, m/s.
    pub rms: f64,
    pub max: f64,
}

/// Desired-versus-actual velocity error during swing, skipping samples within
/// `margin` seconds of the foot's phase changes.
pub fn swing_tracking(log: &TelemetryLog, tolerance: f64, margin: f64) -> TrackingStats {
    let mask = settled_swing_mask(log, margin);
    let mut samples = 0usize;
    let mut within = 0usize;
    let mut sum_sq = 0.0;
    let mut max: f64 = 0.0;
    for (f, m) in log.frames.iter().zip(&mask) {
        for foot in 0..2 {
            if !m[foot] {
                continue;
            }
            let ft = &f.feet[foot];
            let e = ft.desired_velocity - ft.velocity;
            samples += 1;
            if e.x.abs() <= tolerance && e.z.abs() <= tolerance {
                within += 1;
            }
            sum_sq += e.x * e.x + e.z * e.z;
            max = max.max(e.norm());
        }
    }
    TrackingStats {
        samples,
        within: if samples > 0 { within as f64 / samples as f64 } else { 0.0 },
        rms: if samples > 0 { (sum_sq / samples as f64).sqrt() } else { 0.0 },
        max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceEnvelope {
    pub samples: usize,
    /// Largest force magnitude seen in swing, N.
    pub peak: f64,
    /// Fraction of swing samples at or below `typical`.
    pub fraction_typical: f64,
    pub typical: f64,
}

/// Magnitude of the measured interaction force over all swing samples.
pub fn swing_force_envelope(log: &TelemetryLog, typical: f64) -> ForceEnvelope {
    let mut samples = 0usize;
    let mut below = 0usize;
    let mut peak: f64 = 0.0;
    for f in &log.frames {
        for ft in &f.feet {
            if ft.phase != GaitPhase::Swing {
                continue;
            }
            let m = ft.measured_force.norm();
            samples += 1;
            peak = peak.max(m);
            if m <= typical {
                below += 1;
            }
        }
    }
    ForceEnvelope {
        samples,
        peak,
        fraction_typical: if samples > 0 { below as f64 / samples as f64 } else { 0.0 },
        typical,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepResponse {
    /// Time from the command step to 10% of the final velocity, s.
    pub t10: f64,
    pub t90: f64,
}

impl StepResponse {
    pub fn rise_10_90(&self) -> f64 {
        self.t90 - self.t10
    }
}

/// Velocity response of one gantry axis to a commanded velocity step issued
/// at tick 0, including the transport delay.
pub fn axis_step_response(plant: &PlantParams, loop_config: &LoopConfig, step: f64) -> Result<StepResponse, ParamError> {
    loop_config.validate()?;
    if !(step.is_finite() && step != 0.0 && step.abs() <= plant.velocity_limit) {
        return Err(ParamError::new("step", "must be non-zero and within the velocity limit"));
    }
    let params = plant.axis((f64::MIN / 4.0, f64::MAX / 4.0), loop_config.delay_cycles);
    let mut axis = GantryAxis::new(&params, 0.0)?;
    let dt = loop_config.dt();
    let mut t10 = None;
    let mut t90 = None;
    let horizon = loop_config.delay_cycles as u64 + (100.0 * plant.lag_time_constant / dt).ceil() as u64;
    for k in 0..=horizon {
        axis.step(step, dt);
        let frac = axis.velocity / step;
        let t = k as f64 * dt;
        if t10.is_none() && frac >= 0.1 {
            t10 = Some(t);
        }
        if t90.is_none() && frac >= 0.9 {
            t90 = Some(t);
            break;
        }
    }
    match (t10, t90) {
        (Some(t10), Some(t90)) => Ok(StepResponse { t10, t90 }),
        _ => Err(ParamError::new("lag_time_constant", "axis never reaches 90% of the step")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::telemetry::{FootTelemetry, TelemetryFrame, WalkTelemetry};
    use crate::planar::Planar;

    fn frame(tick: u64, t_end_ns: u64) -> TelemetryFrame {
        TelemetryFrame {
            tick,
            t_start_ns: None,
            t_end_ns,
            jitter_ns: 0,
            overrun: false,
            feet: [FootTelemetry {
                phase: GaitPhase::Stance,
                measured_force: Planar::ZERO,
                desired_velocity: Planar::ZERO,
                velocity: Planar::ZERO,
                position: Planar::ZERO,
                ground_z: 0.0,
                limit: false,
                ground_fallback: false,
            }; 2],
            walk: WalkTelemetry {
                walk_velocity: 0.0,
                d_x: 0.0,
                d_z: 0.0,
                slope: 0.0,
            },
        }
    }

    #[test]
    fn one_gap_gives_one_millisecond_deviation() {
        let log = TelemetryLog {
            rate: 1000.0,
            frames: vec![frame(0, 0), frame(1, 1_000_000), frame(2, 2_000_000), frame(3, 4_000_000)],
            ..Default::default()
        };
        let j = jitter_stats(&log).unwrap();
        assert_eq!(j.max, 0.001);
        assert_eq!(j.p99, 0.001);
    }

    #[test]
    fn two_frames_give_one_interval() {
        let log = TelemetryLog {
            rate: 1000.0,
            frames: vec![frame(0, 0), frame(1, 1_000_000)],
            ..Default::default()
        };
        let j = jitter_stats(&log).unwrap();
        assert_eq!((j.mean, j.p99, j.max), (0.0, 0.0, 0.0));
        assert!(jitter_stats(&TelemetryLog::default()).is_err());
    }

    #[test]
    fn default_axis_rise_is_in_the_observed_window() {
        let r = axis_step_response(&PlantParams::default(), &LoopConfig::default(), 0.5).unwrap();
        assert!((0.003..=0.008).contains(&r.t10), "{r:?}");
        assert!((0.006..=0.020).contains(&r.rise_10_90()), "{r:?}");
    }
}
