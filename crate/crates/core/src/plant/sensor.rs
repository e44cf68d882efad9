use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Force-sensor path: the foam between sensor and platform acts as a low-pass
/// filter, and the reading carries white noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForceSensorModel {
    /// Standard deviation of the additive noise, N.
    pub noise_sigma: f64,
    /// Low-pass cutoff, Hz.
    pub lowpass_cutoff: f64,
}

impl Default for ForceSensorModel {
    fn default() -> Self {
        Self {
            noise_sigma: 0.5,
            lowpass_cutoff: 100.0,
        }
    }
}

impl ForceSensorModel {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(ParamError::new("noise_sigma", "must be finite and >= 0"));
        }
        if !(self.lowpass_cutoff.is_finite() && self.lowpass_cutoff > 0.0) {
            return Err(ParamError::new("lowpass_cutoff", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Fraction of a step covered in one sample, `1 - exp(-2π f_c dt)`.
    pub fn smoothing(&self, dt: f64) -> f64 {
        -(-2.0 * std::f64::consts::PI * self.lowpass_cutoff * dt).exp_m1()
    }
}

/// One sensing channel with its own filter state and noise stream.
#[derive(Debug, Clone)]
pub struct ForceSensor {
    model: ForceSensorModel,
    filtered: f64,
    rng: ChaCha8Rng,
}

impl ForceSensor {
    /// `stream` separates channels sharing a scenario seed.
    pub fn new(model: ForceSensorModel, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            model,
            filtered: 0.0,
            rng,
        }
    }

    /// Starts the filter settled at `force` instead of zero.
    pub fn preload(&mut self, force: f64) {
        self.filtered = force;
    }

    pub fn sense(&mut self, true_force: f64, dt: f64) -> f64 {
        self.filtered += (true_force - self.filtered) * self.model.smoothing(dt);
        let noise: f64 = self.rng.sample(StandardNormal);
        self.filtered + self.model.noise_sigma * noise
    }
}

/// Convenience wrapper for one sample; the sensor state advances in place.
pub fn sense_force(sensor: &mut ForceSensor, true_force: f64, dt: f64) -> f64 {
    sensor.sense(true_force, dt)
}
