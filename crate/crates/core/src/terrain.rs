//! Virtual terrain, walking-velocity estimation and stance-phase platform commands.
//!
//! While a foot is in stance its platform is driven along the virtual ground
//! at the negated walking velocity, like a treadmill belt. On sloped terrain
//! the vertical command follows the slope measured between the two most
//! recent footholds, and integrating the commands gives the avatar's travel.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::planar::{FootId, Planar};

/// Run below which a footstep slope is considered degenerate, m.
pub const MIN_SLOPE_RUN: f64 = 0.001;

/// Latest terrain heights reported by an external terrain service, per foot.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExternalHeights {
    heights: [Option<f64>; 2],
}

impl ExternalHeights {
    pub fn set(&mut self, foot: FootId, height: f64) {
        if height.is_finite() {
            self.heights[foot.index()] = Some(height);
        }
    }

    pub fn get(&self, foot: FootId) -> Option<f64> {
        self.heights[foot.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TerrainProfile {
    Flat {
        #[serde(default)]
        height: f64,
    },
    /// Constant incline `z = slope * x` (an escalator under the feet).
    Stair { slope: f64 },
    /// One height per footstep, cycled.
    Uneven { step_heights: Vec<f64> },
    /// Heights supplied per foot by a terrain service.
    External {
        #[serde(skip)]
        heights: ExternalHeights,
    },
}

impl Default for TerrainProfile {
    fn default() -> Self {
        TerrainProfile::Flat { height: 0.0 }
    }
}

/// Result of a ground query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundHeight {
    pub z: f64,
    /// Set when an external profile had no height yet and 0 was substituted.
    pub fallback: bool,
}

impl TerrainProfile {
    pub fn external() -> Self {
        TerrainProfile::External {
            heights: ExternalHeights::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        match self {
            TerrainProfile::Flat { height } if !height.is_finite() => {
                Err(ParamError::new("height", "must be finite"))
            }
            TerrainProfile::Stair { slope } if !slope.is_finite() => {
                Err(ParamError::new("slope", "must be finite"))
            }
            TerrainProfile::Uneven { step_heights } => {
                if step_heights.is_empty() {
                    Err(ParamError::new("step_heights", "must not be empty"))
                } else if step_heights.iter().any(|h| !h.is_finite()) {
                    Err(ParamError::new("step_heights", "must be finite"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Whether stance commands follow the measured footstep slope.
    ///
    /// Uneven ground changes height per step without vertical compensation;
    /// the other profiles are rendered as a continuous surface.
    pub fn compensates_slope(&self) -> bool {
        !matches!(self, TerrainProfile::Uneven { .. })
    }

    pub fn external_heights_mut(&mut self) -> Option<&mut ExternalHeights> {
        match self {
            TerrainProfile::External { heights } => Some(heights),
            _ => None,
        }
    }

    /// Ground height under `foot` at horizontal position `x` on footstep `step_index`.
    pub fn ground_height(&self, foot: FootId, x: f64, step_index: usize) -> GroundHeight {
        let exact = |z| GroundHeight { z, fallback: false };
        match self {
            TerrainProfile::Flat { height } => exact(*height),
            TerrainProfile::Stair { slope } => exact(slope * x),
            TerrainProfile::Uneven { step_heights } => {
                exact(step_heights[step_index % step_heights.len()])
            }
            TerrainProfile::External { heights } => match heights.get(foot) {
                Some(z) => exact(z),
                None => GroundHeight {
                    z: 0.0,
                    fallback: true,
                },
            },
        }
    }
}

/// Which footstep's ground a swinging foot is judged against.
///
/// A foot leaving step `own` keeps that ground until it has risen `margin`
/// above both `own` and the upcoming step `next`; from then on the upcoming
/// step applies. Without this a foot lifting off a low step toward a higher
/// one would be below the new ground the moment it leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SwingGround {
    cleared: bool,
}

impl SwingGround {
    /// Call on toe-off.
    pub fn lift(&mut self) {
        self.cleared = false;
    }

    pub fn cleared(&self) -> bool {
        self.cleared
    }

    pub fn height(
        &mut self,
        profile: &TerrainProfile,
        foot: FootId,
        pos: Planar,
        own: usize,
        next: usize,
        margin: f64,
    ) -> GroundHeight {
        let next_ground = profile.ground_height(foot, pos.x, next);
        if self.cleared {
            return next_ground;
        }
        let own_ground = profile.ground_height(foot, pos.x, own);
        if pos.z > own_ground.z.max(next_ground.z) + margin {
            self.cleared = true;
            next_ground
        } else {
            own_ground
        }
    }
}

/// Free-function form of [`TerrainProfile::ground_height`] for the right foot.
pub fn ground_height(profile: &TerrainProfile, x: f64, step_index: usize) -> GroundHeight {
    profile.ground_height(FootId::RIGHT, x, step_index)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkMode {
    /// Stance platforms move at a configured constant speed.
    Fixed { speed: f64 },
    /// Speed is estimated from ground reaction force and lumped user mass.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkState {
    /// Lumped user mass, kg.
    pub user_mass: f64,
    /// Estimated walking velocity, m/s (forward positive).
    pub walk_velocity: f64,
    /// Integrated platform compensation `(d_x, d_z)`, m.
    pub travel: Planar,
    /// Footstep slope `m_k`.
    pub current_slope: f64,
    pub speed_limit: f64,
    /// Whether the estimate may go negative. When unset the estimate is
    /// clamped to `[0, speed_limit]`, matching a forward-only device.
    pub reverse: bool,
    pub mode: WalkMode,
    /// Count of rejected estimator inputs.
    pub faults: u64,
}

impl WalkState {
    pub fn new(user_mass: f64, speed_limit: f64, mode: WalkMode) -> Result<Self, ParamError> {
        if !(user_mass.is_finite() && user_mass > 0.0) {
            return Err(ParamError::new("user_mass", "must be finite and > 0"));
        }
        if !(speed_limit.is_finite() && speed_limit > 0.0) {
            return Err(ParamError::new("speed_limit", "must be finite and > 0"));
        }
        let walk_velocity = match mode {
            WalkMode::Fixed { speed } => {
                if !speed.is_finite() || speed.abs() > speed_limit {
                    return Err(ParamError::new(
                        "speed",
                        format!("fixed speed must be finite and within the {speed_limit} m/s limit"),
                    ));
                }
                speed
            }
            WalkMode::Dynamic => 0.0,
        };
        Ok(Self {
            user_mass,
            walk_velocity,
            travel: Planar::ZERO,
            current_slope: 0.0,
            speed_limit,
            reverse: false,
            mode,
            faults: 0,
        })
    }

    /// Forward distance and height of the avatar (the negated travel).
    pub fn avatar(&self) -> Planar {
        -self.travel
    }
}

/// Integrates `a_x = f_grf_x / m` into the walking velocity for one sample.
///
/// Call only while at least one foot is in stance. A fixed-speed state
/// returns its configured speed unchanged.
pub fn estimate_walk_velocity(state: WalkState, f_grf_x: f64, dt: f64) -> WalkState {
    match state.mode {
        WalkMode::Fixed { speed } => WalkState {
            walk_velocity: speed,
            ..state
        },
        WalkMode::Dynamic => {
            if !f_grf_x.is_finite() || !dt.is_finite() || dt <= 0.0 {
                return WalkState {
                    faults: state.faults + 1,
                    ..state
                };
            }
            let accel = f_grf_x / state.user_mass;
            let floor = if state.reverse { -state.speed_limit } else { 0.0 };
            let v = (state.walk_velocity + accel * dt).clamp(floor, state.speed_limit);
            WalkState {
                walk_velocity: v,
                ..state
            }
        }
    }
}

/// Platform velocity `(v_px, v_pz)` for a foot in stance.
pub fn stance_platform_command(state: &WalkState) -> Planar {
    let v_px = -state.walk_velocity;
    Planar::new(v_px, state.current_slope * v_px)
}

/// Heel-strike positions of the leading and trailing foot; `z` is the terrain height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootstepRecord {
    pub forefoot: Planar,
    pub rearfoot: Planar,
    pub step_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("footstep run {run:.6} m is below {MIN_SLOPE_RUN} m; slope is undefined")]
pub struct DegenerateFootstep {
    pub run: f64,
}

/// Slope `m_k = (z_f - z_r) / (x_f - x_r)` between the two footholds.
pub fn update_slope(rec: &FootstepRecord) -> Result<f64, DegenerateFootstep> {
    let run = rec.forefoot.x - rec.rearfoot.x;
    if !(run.abs() >= MIN_SLOPE_RUN) {
        return Err(DegenerateFootstep { run });
    }
    let slope = (rec.forefoot.z - rec.rearfoot.z) / run;
    if slope.is_finite() {
        Ok(slope)
    } else {
        Err(DegenerateFootstep { run })
    }
}

/// Accumulates the avatar travel `d += v_p * dt`.
pub fn integrate_travel(state: WalkState, v_p: Planar, dt: f64) -> WalkState {
    WalkState {
        travel: Planar::new(state.travel.x + v_p.x * dt, state.travel.z + v_p.z * dt),
        ..state
    }
}
