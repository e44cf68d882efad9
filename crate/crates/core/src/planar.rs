//! Sagittal-plane vectors and foot identifiers.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A quantity with an X (horizontal, walking direction) and Z (vertical) component.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Planar {
    pub x: f64,
    pub z: f64,
}

impl Planar {
    pub const ZERO: Planar = Planar { x: 0.0, z: 0.0 };

    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.z.is_finite()
    }

    pub fn get(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Z => self.z,
        }
    }

    pub fn set(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::X => self.x = value,
            Axis::Z => self.z = value,
        }
    }
}

impl Add for Planar {
    type Output = Planar;
    fn add(self, rhs: Planar) -> Planar {
        Planar::new(self.x + rhs.x, self.z + rhs.z)
    }
}

impl Sub for Planar {
    type Output = Planar;
    fn sub(self, rhs: Planar) -> Planar {
        Planar::new(self.x - rhs.x, self.z - rhs.z)
    }
}

impl Mul<f64> for Planar {
    type Output = Planar;
    fn mul(self, rhs: f64) -> Planar {
        Planar::new(self.x * rhs, self.z * rhs)
    }
}

impl Neg for Planar {
    type Output = Planar;
    fn neg(self) -> Planar {
        Planar::new(-self.x, -self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Z];
}

/// Index of a foot platform. The device has two: 0 (right) and 1 (left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FootId(pub u8);

impl FootId {
    pub const RIGHT: FootId = FootId(0);
    pub const LEFT: FootId = FootId(1);
    pub const BOTH: [FootId; 2] = [FootId::RIGHT, FootId::LEFT];

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn other(self) -> FootId {
        FootId(1 - self.0.min(1))
    }
}

impl std::fmt::Display for FootId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
