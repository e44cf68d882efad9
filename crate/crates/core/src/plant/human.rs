//! Synthetic walker coupled to the foot platforms through a spring-damper.
//!
//! The walker steps on a fixed cadence. In swing it pulls its platform along
//! a reference path toward the next foothold; in stance it stands on the
//! platform, loading it with body weight and dragging it with its feet's
//! damping at the walker's intended speed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::gait::{FootState, GaitPhase};
use crate::gaitgen::SwingShape;
use crate::planar::{FootId, Planar};
use crate::terrain::TerrainProfile;

/// Heaviest user the device is designed for, kg.
pub const MAX_USER_MASS: f64 = 90.0;

/// Intended walking speed over time: ramp up, hold, ramp down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntentProfile {
    /// Cruise speed, m/s.
    pub speed: f64,
    /// Start of the ramp-up, s.
    pub start: f64,
    pub ramp_up: f64,
    /// Start of the ramp-down, s. `None` keeps walking.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    pub ramp_down: f64,
}

impl Default for IntentProfile {
    fn default() -> Self {
        Self::constant(0.4)
    }
}

impl IntentProfile {
    pub fn constant(speed: f64) -> Self {
        Self {
            speed,
            start: 0.0,
            ramp_up: 0.0,
            stop: None,
            ramp_down: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (key, v) in [
            ("speed", self.speed),
            ("start", self.start),
            ("ramp_up", self.ramp_up),
            ("ramp_down", self.ramp_down),
        ] {
            if !v.is_finite() {
                return Err(ParamError::new(key, "must be finite"));
            }
        }
        if self.ramp_up < 0.0 || self.ramp_down < 0.0 {
            return Err(ParamError::new("ramp_up", "ramps must be >= 0"));
        }
        if let Some(stop) = self.stop {
            if !(stop.is_finite() && stop >= self.start + self.ramp_up) {
                return Err(ParamError::new("stop", "must not precede the end of the ramp-up"));
            }
        }
        Ok(())
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        let up_end = self.start + self.ramp_up;
        if t < self.start {
            return 0.0;
        }
        if t < up_end {
            return self.speed * (t - self.start) / self.ramp_up;
        }
        match self.stop {
            Some(stop) if t >= stop => {
                if t < stop + self.ramp_down {
                    self.speed * (1.0 - (t - stop) / self.ramp_down)
                } else {
                    0.0
                }
            }
            _ => self.speed,
        }
    }

    /// Intended distance walked since time zero, the exact integral of [`speed_at`](Self::speed_at).
    pub fn distance(&self, t: f64) -> f64 {
        let up_end = self.start + self.ramp_up;
        if t <= self.start {
            return 0.0;
        }
        if t < up_end {
            let u = t - self.start;
            return 0.5 * self.speed * u * u / self.ramp_up;
        }
        let cruise_from = 0.5 * self.speed * self.ramp_up;
        match self.stop {
            Some(stop) if t > stop => {
                let at_stop = cruise_from + self.speed * (stop - up_end);
                let u = (t - stop).min(self.ramp_down);
                let down = if self.ramp_down > 0.0 {
                    self.speed * (u - 0.5 * u * u / self.ramp_down)
                } else {
                    0.0
                };
                at_stop + down
            }
            _ => cruise_from + self.speed * (t - up_end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HumanParams {
    /// Coupling stiffness `K_h`, N/m.
    pub stiffness: f64,
    /// Coupling damping `B_h`, N·s/m.
    pub damping: f64,
    pub user_mass: f64,
    pub weight_ramp_time: f64,
    pub gravity: f64,
    /// Gait cycle period, s.
    pub cycle_time: f64,
    /// Fraction of the cycle each foot spends in stance.
    pub duty_factor: f64,
    /// Ramp fraction of the swing progress profile.
    pub swing_ramp_fraction: f64,
    /// Swing apex above the straight lift-to-land line, m.
    pub clearance: f64,
    /// Platform-frame x where the walker places its foot, m.
    pub front_x: f64,
    /// How far below the ground the landing target lies, m.
    pub landing_depth: f64,
    /// First lift-off (left foot), s.
    pub step_start: f64,
    /// No lift-off is started at or after this time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_stop: Option<f64>,
    pub intent: IntentProfile,
    /// Standing x of both feet at time zero. Defaults to mid-gait positions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_x: Option<[f64; 2]>,
    /// Terrain the walker believes it walks on. Defaults to the scenario terrain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perceived_terrain: Option<TerrainProfile>,
}

impl Default for HumanParams {
    fn default() -> Self {
        Self {
            stiffness: 2000.0,
            damping: 50.0,
            user_mass: 80.0,
            weight_ramp_time: 0.1,
            gravity: 9.81,
            cycle_time: 3.2,
            duty_factor: 0.55,
            swing_ramp_fraction: 0.3,
            clearance: 0.1,
            front_x: 0.35,
            landing_depth: 0.01,
            step_start: 0.2,
            step_stop: None,
            intent: IntentProfile::default(),
            initial_x: None,
            perceived_terrain: None,
        }
    }
}

impl HumanParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        let non_negative = [
            ("stiffness", self.stiffness),
            ("damping", self.damping),
            ("weight_ramp_time", self.weight_ramp_time),
            ("gravity", self.gravity),
            ("clearance", self.clearance),
            ("landing_depth", self.landing_depth),
            ("step_start", self.step_start),
        ];
        for (key, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ParamError::new(key, "must be finite and >= 0"));
            }
        }
        if !(self.user_mass > 0.0 && self.user_mass <= MAX_USER_MASS) {
            return Err(ParamError::new(
                "user_mass",
                format!("must be in (0, {MAX_USER_MASS}] kg"),
            ));
        }
        if !(self.cycle_time.is_finite() && self.cycle_time > 0.0) {
            return Err(ParamError::new("cycle_time", "must be finite and > 0"));
        }
        if !(self.duty_factor > 0.5 && self.duty_factor < 1.0) {
            return Err(ParamError::new("duty_factor", "must be in (0.5, 1)"));
        }
        SwingShape::new(self.swing_ramp_fraction)?;
        if !self.front_x.is_finite() {
            return Err(ParamError::new("front_x", "must be finite"));
        }
        if let Some(x) = self.initial_x {
            if !x.iter().all(|v| v.is_finite()) {
                return Err(ParamError::new("initial_x", "must be finite"));
            }
        }
        if let Some(terrain) = &self.perceived_terrain {
            terrain.validate().map_err(|e| e.under("perceived_terrain"))?;
        }
        self.intent.validate().map_err(|e| e.under("intent"))
    }

    pub fn weight(&self) -> f64 {
        self.user_mass * self.gravity
    }

    pub fn swing_time(&self) -> f64 {
        (1.0 - self.duty_factor) * self.cycle_time
    }

    /// Time of the first lift-off of `foot`; the left foot leads.
    fn first_lift(&self, foot: FootId) -> f64 {
        if foot == FootId::LEFT {
            self.step_start
        } else {
            self.step_start + 0.5 * self.cycle_time
        }
    }

    /// The lift-off and landing times of the scheduled swing containing `t`.
    pub fn swing_window(&self, foot: FootId, t: f64) -> Option<(f64, f64)> {
        let first = self.first_lift(foot);
        if t < first {
            return None;
        }
        let k = ((t - first) / self.cycle_time).floor();
        let lift = first + k * self.cycle_time;
        if self.step_stop.is_some_and(|stop| lift >= stop) {
            return None;
        }
        let land = lift + self.swing_time();
        (t < land).then_some((lift, land))
    }

    /// The first scheduled lift-off of `foot` at or after `t`.
    pub fn next_lift(&self, foot: FootId, t: f64) -> Option<f64> {
        let first = self.first_lift(foot);
        let lift = if t <= first {
            first
        } else {
            first + ((t - first) / self.cycle_time).ceil() * self.cycle_time
        };
        match self.step_stop {
            Some(stop) if lift >= stop => None,
            _ => Some(lift),
        }
    }

    /// Standing positions at time zero: where a steady gait at cruise speed
    /// would have each foot given its first lift-off time.
    pub fn initial_positions(&self) -> [f64; 2] {
        if let Some(x) = self.initial_x {
            return x;
        }
        let stance = self.duty_factor * self.cycle_time;
        let v = self.intent.speed;
        FootId::BOTH.map(|foot| self.front_x - v * (stance - self.first_lift(foot)))
    }
}

/// Spring-damper coupling force pulling the platform toward the reference.
pub fn impedance_force(params: &HumanParams, reference: Planar, ref_velocity: Planar, platform: &FootState) -> Planar {
    Planar::new(
        params.stiffness * (reference.x - platform.position.x)
            + params.damping * (ref_velocity.x - platform.velocity.x),
        params.stiffness * (reference.z - platform.position.z)
            + params.damping * (ref_velocity.z - platform.velocity.z),
    )
}

/// Coupling force plus the ramped stance weight `-m g * ramp` on z.
pub fn human_force(
    params: &HumanParams,
    reference: Planar,
    ref_velocity: Planar,
    platform: &FootState,
    weight_ramp: f64,
) -> Planar {
    let mut f = impedance_force(params, reference, ref_velocity, platform);
    if platform.phase == GaitPhase::Stance {
        f.z -= params.weight() * weight_ramp.clamp(0.0, 1.0);
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SwingPlan {
    lift: f64,
    land: f64,
    /// Platform position when the swing began.
    origin: Planar,
    toe_off: Option<ToeOff>,
}

/// Time and reference position, without the lift, at the observed toe-off.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ToeOff {
    t: f64,
    base: Planar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FootMode {
    Planted { since: f64 },
    Swinging(SwingPlan),
}

#[derive(Debug, Clone, Copy)]
struct WalkerFoot {
    mode: FootMode,
    last_phase: GaitPhase,
    last_lift: Option<f64>,
}

/// Stateful synthetic walker driving both platforms.
#[derive(Debug, Clone)]
pub struct HumanModel {
    params: HumanParams,
    shape: SwingShape,
    terrain: TerrainProfile,
    feet: [WalkerFoot; 2],
    strikes_seen: usize,
}

impl HumanModel {
    /// `terrain` is used unless the parameters name a perceived terrain.
    pub fn new(params: HumanParams, terrain: &TerrainProfile) -> Result<Self, ParamError> {
        params.validate()?;
        let shape = SwingShape::new(params.swing_ramp_fraction)?;
        let terrain = params.perceived_terrain.clone().unwrap_or_else(|| terrain.clone());
        let planted = WalkerFoot {
            mode: FootMode::Planted {
                since: f64::NEG_INFINITY,
            },
            last_phase: GaitPhase::Stance,
            last_lift: None,
        };
        Ok(Self {
            params,
            shape,
            terrain,
            feet: [planted; 2],
            strikes_seen: 0,
        })
    }

    pub fn params(&self) -> &HumanParams {
        &self.params
    }

    /// Interaction forces on both platforms at time `t`. `platforms[i].phase`
    /// is the controller's current classification of foot `i`.
    pub fn forces(&mut self, t: f64, platforms: &[FootState; 2]) -> [Planar; 2] {
        for foot in FootId::BOTH {
            self.observe(foot, t, &platforms[foot.index()]);
        }
        let shares = FootId::BOTH.map(|foot| self.weight_share(foot, t));
        let total = (shares[0] + shares[1]).max(1.0);
        FootId::BOTH.map(|foot| {
            let i = foot.index();
            let p = &platforms[i];
            match self.feet[i].mode {
                FootMode::Planted { .. } => {
                    let v = self.params.intent.speed_at(t);
                    Planar::new(
                        self.params.damping * (-v - p.velocity.x),
                        -self.params.weight() * shares[i] / total,
                    )
                }
                FootMode::Swinging(plan) => {
                    let (r, rv) = self.swing_reference(foot, &plan, t);
                    impedance_force(&self.params, r, rv, p)
                }
            }
        })
    }

    fn observe(&mut self, foot: FootId, t: f64, platform: &FootState) {
        let i = foot.index();
        let prev = self.feet[i].last_phase;
        let phase = platform.phase;
        self.feet[i].last_phase = phase;
        let struck = prev == GaitPhase::Swing && phase == GaitPhase::Stance;
        let lifted = prev == GaitPhase::Stance && phase == GaitPhase::Swing;
        if struck {
            self.strikes_seen += 1;
        }
        match self.feet[i].mode {
            FootMode::Planted { .. } => {
                if let Some((lift, land)) = self.params.swing_window(foot, t) {
                    if self.feet[i].last_lift != Some(lift) {
                        self.feet[i].last_lift = Some(lift);
                        self.feet[i].mode = FootMode::Swinging(SwingPlan {
                            lift,
                            land,
                            origin: platform.position,
                            toe_off: None,
                        });
                    }
                }
            }
            FootMode::Swinging(mut plan) => {
                if lifted && plan.toe_off.is_none() {
                    let (base, _) = self.planted_path(&plan, t);
                    plan.toe_off = Some(ToeOff { t, base });
                    self.feet[i].mode = FootMode::Swinging(plan);
                }
                // A touchdown early in the swing is a stumble; keep swinging.
                if struck && t - plan.lift >= 0.5 * (plan.land - plan.lift) {
                    self.feet[i].mode = FootMode::Planted { since: t };
                }
            }
        }
    }

    fn travelled(&self, from: f64, to: f64) -> f64 {
        self.params.intent.distance(to) - self.params.intent.distance(from)
    }

    fn weight_share(&self, foot: FootId, t: f64) -> f64 {
        let FootMode::Planted { since } = self.feet[foot.index()].mode else {
            return 0.0;
        };
        let ramp = self.params.weight_ramp_time;
        let ramp_of = |dt: f64| {
            if ramp > 0.0 {
                (dt / ramp).clamp(0.0, 1.0)
            } else if dt >= 0.0 {
                1.0
            } else {
                0.0
            }
        };
        let w_in = ramp_of(t - since);
        let w_out = self.params.next_lift(foot, t).map_or(1.0, |lift| ramp_of(lift - t));
        w_in.min(w_out)
    }

    /// Ground height the walker aims its next landing at.
    fn landing_height(&self, foot: FootId) -> f64 {
        let next_step = self.strikes_seen + 1;
        self.terrain.ground_height(foot, self.params.front_x, next_step).z - self.params.landing_depth
    }

    /// Where a foot still planted at `origin` would be at `t`: carried back by
    /// the intended walk and kept on the perceived ground.
    fn planted_path(&self, plan: &SwingPlan, t: f64) -> (Planar, Planar) {
        let v_int = self.params.intent.speed_at(t);
        let x = plan.origin.x - self.travelled(plan.lift, t);
        let ground = |x: f64| self.terrain.ground_height(FootId::RIGHT, x, 0).z;
        let z = plan.origin.z + ground(x) - ground(plan.origin.x);
        let h = 1e-4;
        let slope = (ground(x + h) - ground(x - h)) / (2.0 * h);
        (Planar::new(x, z), Planar::new(-v_int, -v_int * slope))
    }

    fn swing_reference(&self, foot: FootId, plan: &SwingPlan, t: f64) -> (Planar, Planar) {
        let p = &self.params;
        let duration = plan.land - plan.lift;
        let s = ((t - plan.lift) / duration).clamp(0.0, 1.0);
        let lift = p.clearance * (PI * s).sin();
        let lift_rate = if t < plan.land {
            p.clearance * PI * (PI * s).cos() / duration
        } else {
            0.0
        };
        let target = Planar::new(p.front_x, self.landing_height(foot));

        // Until the controller releases the foot it moves with the stance
        // ground; afterwards it travels to the landing point, starting and
        // ending at rest relative to the platform.
        let (base, base_rate) = match plan.toe_off {
            None => self.planted_path(plan, t),
            Some(toe) => {
                let span = plan.land - toe.t;
                if t >= plan.land || span <= 1e-3 {
                    (target, Planar::ZERO)
                } else {
                    let u = (t - toe.t) / span;
                    let reach = target - toe.base;
                    (
                        toe.base + reach * self.shape.position(u),
                        reach * (self.shape.velocity(u) / span),
                    )
                }
            }
        };
        (
            Planar::new(base.x, base.z + lift),
            Planar::new(base_rate.x, base_rate.z + lift_rate),
        )
    }
}
