use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::admittance::{step_admittance, AdmittanceParams, AxisAdmittanceState};
use crate::error::ParamError;
use crate::gait::GaitPhase;
use crate::runtime::{run_scenario, swing_force_envelope, swing_tracking, ScenarioConfig, TelemetryLog};

/// Spectral segment length for the oscillation metric, samples.
const SEGMENT: usize = 256;

/// Frequency above which force content counts as oscillation, Hz.
pub const OSCILLATION_CUTOFF_HZ: f64 = 5.0;

/// Peak-to-median spectral ratio above which a cell is flagged oscillatory.
pub const OSCILLATION_RATIO: f64 = 3.0;

/// Grid over virtual mass and damping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub virtual_mass: Vec<f64>,
    pub virtual_damping: Vec<f64>,
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.virtual_mass
            .iter()
            .flat_map(|&m| self.virtual_damping.iter().map(move |&c| (m, c)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationMetric {
    /// Frequency of the largest spectral peak above the cutoff, Hz.
    pub peak_hz: f64,
    /// That peak's power over the median power of all non-DC bins.
    pub ratio: f64,
    pub oscillatory: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellMetrics {
    pub peak_swing_force: f64,
    pub tracking_rms: f64,
    pub oscillation: OscillationMetric,
    /// Settled swing velocity per newton of constant force, m/s/N.
    pub steady_state_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellOutcome {
    Ran(CellMetrics),
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub virtual_mass: f64,
    pub virtual_damping: f64,
    #[serde(flatten)]
    pub outcome: CellOutcome,
}

impl CellReport {
    pub fn metrics(&self) -> Option<&CellMetrics> {
        match &self.outcome {
            CellOutcome::Ran(m) => Some(m),
            CellOutcome::Skipped { .. } => None,
        }
    }
}

/// Velocity the discrete admittance law settles at under a constant 1 N.
pub fn steady_state_gain(params: &AdmittanceParams, dt: f64) -> Result<f64, ParamError> {
    params.check_step(dt)?;
    let mut state = AxisAdmittanceState::new(None);
    let horizon = ((40.0 * params.time_constant() / dt).ceil() as u64).max(1);
    for _ in 0..horizon {
        let next = step_admittance(params, state, 1.0, dt).map_err(|_| ParamError::new("dt", "must be finite and > 0"))?;
        let settled = (next.desired_velocity - state.desired_velocity).abs() <= 1e-15;
        state = next;
        if settled {
            break;
        }
    }
    Ok(state.desired_velocity)
}

/// Averaged power spectrum of the swing interaction force, from
/// Hann-windowed, detrended segments that lie entirely inside one swing.
pub fn oscillation_metric(log: &TelemetryLog) -> Option<OscillationMetric> {
    if !(log.rate > 0.0) {
        return None;
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(SEGMENT);
    let window: Vec<f64> = (0..SEGMENT)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (SEGMENT - 1) as f64).cos())
        .collect();
    let bins = SEGMENT / 2;
    let mut power = vec![0.0; bins + 1];
    let mut segments = 0usize;

    for foot in 0..2 {
        for axis in 0..2 {
            let mut run: Vec<f64> = Vec::new();
            let mut flush = |run: &mut Vec<f64>| {
                for chunk in run.chunks_exact(SEGMENT) {
                    accumulate(chunk, &window, fft.as_ref(), &mut power);
                    segments += 1;
                }
                run.clear();
            };
            for f in &log.frames {
                let ft = &f.feet[foot];
                if ft.phase == GaitPhase::Swing {
                    run.push(if axis == 0 { ft.measured_force.x } else { ft.measured_force.z });
                } else {
                    flush(&mut run);
                }
            }
            flush(&mut run);
        }
    }
    if segments == 0 {
        return None;
    }

    let df = log.rate / SEGMENT as f64;
    let mut broadband: Vec<f64> = power[1..].to_vec();
    broadband.sort_by(f64::total_cmp);
    let median = broadband[broadband.len() / 2];
    // Only local maxima count: the skirt of the gait's own low-frequency
    // content falls off monotonically and is not an oscillation.
    let (k, peak) = (1..bins)
        .filter(|&k| k as f64 * df > OSCILLATION_CUTOFF_HZ)
        .filter(|&k| power[k] > power[k - 1] && power[k] >= power[k + 1])
        .map(|k| (k, &power[k]))
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap_or((bins, &power[bins]));
    let ratio = if median > 0.0 { peak / median } else { f64::INFINITY };
    Some(OscillationMetric {
        peak_hz: k as f64 * df,
        ratio,
        oscillatory: ratio > OSCILLATION_RATIO,
    })
}

fn accumulate(chunk: &[f64], window: &[f64], fft: &dyn rustfft::Fft<f64>, power: &mut [f64]) {
    // Least-squares linear detrend so slow swing motion does not leak upward.
    let n = chunk.len() as f64;
    let mean_i = (n - 1.0) / 2.0;
    let mean_y = chunk.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in chunk.iter().enumerate() {
        let dx = i as f64 - mean_i;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    let mut buf: Vec<Complex<f64>> = chunk
        .iter()
        .zip(window)
        .enumerate()
        .map(|(i, (y, w))| Complex::new((y - mean_y - slope * (i as f64 - mean_i)) * w, 0.0))
        .collect();
    fft.process(&mut buf);
    for (p, c) in power.iter_mut().zip(&buf) {
        *p += c.norm_sqr();
    }
}

fn run_cell(base: &ScenarioConfig, m: f64, c: f64) -> CellReport {
    let mut cfg = base.clone();
    cfg.admittance = AdmittanceParams {
        virtual_mass: m,
        virtual_damping: c,
    };
    let outcome = match run_scenario(&cfg) {
        Err(e) => CellOutcome::Skipped { reason: e.to_string() },
        Ok(log) => {
            let oscillation = oscillation_metric(&log).unwrap_or(OscillationMetric {
                peak_hz: 0.0,
                ratio: 0.0,
                oscillatory: false,
            });
            match steady_state_gain(&cfg.admittance, cfg.loop_config.dt()) {
                Err(e) => CellOutcome::Skipped { reason: e.to_string() },
                Ok(gain) => CellOutcome::Ran(CellMetrics {
                    peak_swing_force: swing_force_envelope(&log, 40.0).peak,
                    tracking_rms: swing_tracking(&log, 0.1, 0.1).rms,
                    oscillation,
                    steady_state_gain: gain,
                }),
            }
        }
    };
    CellReport {
        virtual_mass: m,
        virtual_damping: c,
        outcome,
    }
}

/// Runs every grid cell as an isolated scenario, in parallel. Reports come
/// back in grid order (mass-major) regardless of scheduling.
pub fn run_sweep(base: &ScenarioConfig, grid: &SweepGrid) -> Result<Vec<CellReport>, ParamError> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(ParamError::new("grid", "must contain at least one cell"));
    }
    Ok(cells.par_iter().map(|&(m, c)| run_cell(base, m, c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gain_is_inverse_damping() {
        let p = AdmittanceParams::default();
        assert_relative_eq!(steady_state_gain(&p, 0.001).unwrap(), 0.25, max_relative = 1e-9);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let grid = SweepGrid {
            virtual_mass: vec![],
            virtual_damping: vec![4.0],
        };
        assert!(run_sweep(&ScenarioConfig::default(), &grid).is_err());
    }

    #[test]
    fn unstable_cell_is_skipped() {
        let mut base = ScenarioConfig::default();
        base.loop_config.duration = 1.0;
        let grid = SweepGrid {
            virtual_mass: vec![0.001],
            virtual_damping: vec![4.0],
        };
        let r = run_sweep(&base, &grid).unwrap();
        assert!(matches!(&r[0].outcome, CellOutcome::Skipped { reason } if reason.contains("admittance")));
    }
}
