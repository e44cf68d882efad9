use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::SwingShape;
use crate::error::{GaitGenError, ParamError};
use crate::planar::Planar;

/// Kinematic targets of a synthetic walking gait, in the platform frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaitParams {
    /// Horizontal span of each foot's motion, m.
    pub step_length: f64,
    /// Swing apex height, m.
    pub foot_clearance: f64,
    pub walk_speed: f64,
    /// Fraction of the cycle in stance.
    pub duty_factor: f64,
    /// Ramp fraction of the swing progress profile.
    pub swing_ramp_fraction: f64,
    /// Fastest platform swing the actuators may be asked for, m/s.
    pub swing_speed_cap: f64,
}

impl Default for GaitParams {
    /// Table-top figures of the reference device: 0.67 m steps, 0.14 m clearance,
    /// 1.2 m/s, with the swing shaped for a 2.92 m/s platform peak.
    fn default() -> Self {
        let walk_speed = 1.2;
        let duty_factor = 0.6;
        Self {
            step_length: 0.67,
            foot_clearance: 0.14,
            walk_speed,
            duty_factor,
            swing_ramp_fraction: ramp_fraction_for_peak(walk_speed, duty_factor, 2.92),
            swing_speed_cap: 3.5,
        }
    }
}

/// Ramp fraction whose platform-frame swing peak equals `peak_speed`.
///
/// The foot covers one cycle of body travel during the swing, so its world
/// plateau speed is `v / ((1 - q)(1 - d))`; the platform sees that minus `v`.
pub fn ramp_fraction_for_peak(walk_speed: f64, duty_factor: f64, peak_speed: f64) -> f64 {
    1.0 - walk_speed / ((peak_speed + walk_speed) * (1.0 - duty_factor))
}

impl GaitParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (key, v) in [
            ("step_length", self.step_length),
            ("foot_clearance", self.foot_clearance),
            ("walk_speed", self.walk_speed),
            ("swing_speed_cap", self.swing_speed_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ParamError::new(key, "must be finite and > 0"));
            }
        }
        if !(self.duty_factor > 0.5 && self.duty_factor < 0.8) {
            return Err(ParamError::new("duty_factor", "must be in (0.5, 0.8)"));
        }
        SwingShape::new(self.swing_ramp_fraction)?;
        Ok(())
    }

    fn shape(&self) -> SwingShape {
        SwingShape::new(self.swing_ramp_fraction).unwrap_or_else(|_| SwingShape::cycloid())
    }

    /// Depth of the backward dip at the start of a swing (and the overshoot
    /// at its end), per unit of `v * T`.
    fn dip(&self) -> f64 {
        let shape = self.shape();
        let q = shape.ramp_fraction();
        let d = self.duty_factor;
        let arg = 1.0 - 2.0 * (1.0 - d) / shape.peak_rate();
        let s = q / std::f64::consts::PI * arg.clamp(-1.0, 1.0).acos();
        ((1.0 - d) * s - shape.position(s)).max(0.0)
    }

    /// Cycle period that makes the horizontal span equal `step_length`.
    pub fn cycle_time(&self) -> f64 {
        self.step_length / (self.walk_speed * (self.duty_factor + 2.0 * self.dip()))
    }

    /// Steps per second (two per cycle).
    pub fn cadence(&self) -> f64 {
        2.0 / self.cycle_time()
    }

    /// Peak platform-frame swing speed, m/s.
    pub fn peak_swing_speed(&self) -> f64 {
        self.walk_speed * self.shape().peak_rate() / (1.0 - self.duty_factor) - self.walk_speed
    }

    /// Analytic platform-frame peak of a cycloidal swing with the same timing.
    pub fn cycloid_peak_swing_speed(&self) -> f64 {
        self.walk_speed * 2.0 / (1.0 - self.duty_factor) - self.walk_speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootSample {
    pub position: Planar,
    pub velocity: Planar,
    /// Absent when imported from a file without acceleration columns.
    pub acceleration: Option<Planar>,
    pub stance: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub feet: [FootSample; 2],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

/// Samples both feet over `duration`, the right foot starting at touchdown and
/// the left half a cycle later.
pub fn generate_gait(params: &GaitParams, duration: f64, dt: f64) -> Result<Trajectory, GaitGenError> {
    params.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ParamError::new("dt", "must be finite and > 0").into());
    }
    let peak = params.peak_swing_speed();
    if peak > params.swing_speed_cap {
        return Err(GaitGenError::SwingTooFast {
            speed: peak,
            cap: params.swing_speed_cap,
        });
    }
    let cycle = params.cycle_time();
    if !(duration >= 2.0 * cycle) {
        return Err(GaitGenError::TooShort { duration, cycle });
    }

    let shape = params.shape();
    let v = params.walk_speed;
    let d = params.duty_factor;
    let swing_time = (1.0 - d) * cycle;
    let h = params.foot_clearance;
    let two_pi = 2.0 * std::f64::consts::PI;
    // Centre the horizontal range on the origin.
    let x_front = 0.5 * v * cycle * d;

    let foot_at = |phase: f64| -> FootSample {
        if phase < d {
            FootSample {
                position: Planar::new(x_front - v * phase * cycle, 0.0),
                velocity: Planar::new(-v, 0.0),
                acceleration: Some(Planar::ZERO),
                stance: true,
            }
        } else {
            let s = (phase - d) / (1.0 - d);
            let x = x_front - v * d * cycle + v * cycle * shape.position(s) - v * swing_time * s;
            let vx = v * cycle * shape.velocity(s) / swing_time - v;
            let ax = v * cycle * shape.acceleration(s) / (swing_time * swing_time);
            let z = 0.5 * h * (1.0 - (two_pi * s).cos());
            let vz = 0.5 * h * two_pi * (two_pi * s).sin() / swing_time;
            let az = 0.5 * h * two_pi * two_pi * (two_pi * s).cos() / (swing_time * swing_time);
            FootSample {
                position: Planar::new(x, z),
                velocity: Planar::new(vx, vz),
                acceleration: Some(Planar::new(ax, az)),
                stance: false,
            }
        }
    };

    let n = (duration / dt).round() as usize;
    let samples = (0..=n)
        .map(|k| {
            let t = k as f64 * dt;
            let phase = |offset: f64| (t / cycle + offset).rem_euclid(1.0);
            TrajectorySample {
                t,
                feet: [foot_at(phase(0.0)), foot_at(phase(0.5))],
            }
        })
        .collect();
    Ok(Trajectory { samples })
}

const FOOT_COLUMNS: [&str; 7] = ["x", "z", "vx", "vz", "ax", "az", "stance"];

impl Trajectory {
    pub fn has_acceleration(&self) -> bool {
        !self.samples.is_empty()
            && self
                .samples
                .iter()
                .all(|s| s.feet.iter().all(|f| f.acceleration.is_some()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), GaitGenError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        for foot in 0..2 {
            header.extend(FOOT_COLUMNS.iter().map(|c| format!("f{foot}_{c}")));
        }
        w.write_record(&header).map_err(|e| GaitGenError::Csv(e.to_string()))?;
        for s in &self.samples {
            let mut row = vec![s.t.to_string()];
            for f in &s.feet {
                let a = f.acceleration.unwrap_or(Planar::new(f64::NAN, f64::NAN));
                row.extend([
                    f.position.x.to_string(),
                    f.position.z.to_string(),
                    f.velocity.x.to_string(),
                    f.velocity.z.to_string(),
                    a.x.to_string(),
                    a.z.to_string(),
                    u8::from(f.stance).to_string(),
                ]);
            }
            w.write_record(&row).map_err(|e| GaitGenError::Csv(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the layout written by [`write_csv`](Self::write_csv). Acceleration
    /// columns are optional.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, GaitGenError> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(|e| GaitGenError::Csv(e.to_string()))?.clone();
        let col = |name: &str| headers.iter().position(|h| h.trim() == name);
        let required = |name: &str| col(name).ok_or_else(|| GaitGenError::Csv(format!("missing column `{name}`")));
        let t_col = required("t")?;
        let mut foot_cols = Vec::new();
        for foot in 0..2 {
            let c = |n: &str| format!("f{foot}_{n}");
            foot_cols.push((
                required(&c("x"))?,
                required(&c("z"))?,
                required(&c("vx"))?,
                required(&c("vz"))?,
                col(&c("ax")).zip(col(&c("az"))),
                required(&c("stance"))?,
            ));
        }
        let mut samples = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| GaitGenError::Csv(e.to_string()))?;
            let num = |i: usize| -> Result<f64, GaitGenError> {
                record
                    .get(i)
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .ok_or_else(|| GaitGenError::Csv(format!("row {}: bad number in column {}", line + 2, i + 1)))
            };
            let mut feet = [FootSample {
                position: Planar::ZERO,
                velocity: Planar::ZERO,
                acceleration: None,
                stance: false,
            }; 2];
            for (foot, &(x, z, vx, vz, acc, stance)) in foot_cols.iter().enumerate() {
                let acceleration = match acc {
                    Some((ax, az)) => {
                        let a = Planar::new(num(ax)?, num(az)?);
                        a.is_finite().then_some(a)
                    }
                    None => None,
                };
                feet[foot] = FootSample {
                    position: Planar::new(num(x)?, num(z)?),
                    velocity: Planar::new(num(vx)?, num(vz)?),
                    acceleration,
                    stance: num(stance)? != 0.0,
                };
            }
            samples.push(TrajectorySample { t: num(t_col)?, feet });
        }
        Ok(Self { samples })
    }
}
