use std::f64::consts::PI;

use crate::error::ParamError;

/// Normalized forward-progress profile `c(s)` of a swinging foot, `s ∈ [0, 1]`.
///
/// The foot's world-frame velocity rises along a half cosine over the first
/// `ramp_fraction` of the swing, holds a plateau, and falls symmetrically.
/// `c(0) = 0`, `c(1) = 1`, and the velocity vanishes at both ends. A ramp
/// fraction of 0.5 (no plateau) gives the cycloid `s - sin(2πs)/2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingShape {
    ramp_fraction: f64,
}

impl SwingShape {
    pub fn new(ramp_fraction: f64) -> Result<Self, ParamError> {
        if !(ramp_fraction > 0.0 && ramp_fraction <= 0.5) {
            return Err(ParamError::new("swing_ramp_fraction", "must be in (0, 0.5]"));
        }
        Ok(Self { ramp_fraction })
    }

    pub fn cycloid() -> Self {
        Self { ramp_fraction: 0.5 }
    }

    pub fn ramp_fraction(&self) -> f64 {
        self.ramp_fraction
    }

    /// Plateau height of `c'(s)`; the mean is 1.
    pub fn peak_rate(&self) -> f64 {
        1.0 / (1.0 - self.ramp_fraction)
    }

    pub fn position(&self, s: f64) -> f64 {
        let q = self.ramp_fraction;
        let w = self.peak_rate();
        let s = s.clamp(0.0, 1.0);
        if s < q {
            0.5 * w * (s - q / PI * (PI * s / q).sin())
        } else if s <= 1.0 - q {
            w * (0.5 * q + (s - q))
        } else {
            1.0 - self.position(1.0 - s)
        }
    }

    pub fn velocity(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        let q = self.ramp_fraction;
        let w = self.peak_rate();
        let r = s.min(1.0 - s);
        if r < q {
            0.5 * w * (1.0 - (PI * r / q).cos())
        } else {
            w
        }
    }

    pub fn acceleration(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        let q = self.ramp_fraction;
        let w = self.peak_rate();
        if s < q {
            0.5 * w * PI / q * (PI * s / q).sin()
        } else if s > 1.0 - q {
            -0.5 * w * PI / q * (PI * (1.0 - s) / q).sin()
        } else {
            0.0
        }
    }
}
