use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::telemetry::{FootTelemetry, RunStats, TelemetryFrame, TelemetryLog, TelemetryTap, WalkTelemetry};
use crate::admittance::{step_admittance, AdmittanceParams, AxisAdmittanceState};
use crate::bridge::{FootPose, InboundMessage, LoopbackLink, OutboundMessage, TerrainLink};
use crate::error::{ParamError, ScenarioError};
use crate::gait::{ContactEvent, ContactKind, FootState, GaitPhase, PhaseThresholds, PhaseTracker};
use crate::planar::{Axis, FootId, Planar};
use crate::plant::{ForceSensor, GantryAxis, HumanModel, HumanParams, PlantParams};
use crate::terrain::{
    estimate_walk_velocity, integrate_travel, stance_platform_command, update_slope, FootstepRecord,
    GroundHeight, SwingGround, TerrainProfile, WalkMode, WalkState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopMode {
    /// Simulated clock advancing exactly `1/rate` per tick.
    Deterministic,
    /// Ticks paced against the host clock.
    WallClock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopConfig {
    /// Control rate, Hz.
    pub rate: f64,
    pub mode: LoopMode,
    /// Simulated time, s.
    pub duration: f64,
    /// Ticks between reading a force and the plant acting on it.
    pub delay_cycles: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            rate: 1000.0,
            mode: LoopMode::Deterministic,
            duration: 10.0,
            delay_cycles: 3,
        }
    }
}

impl LoopConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(ParamError::new("rate", "must be finite and > 0"));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(ParamError::new("duration", "must be finite and >= 0"));
        }
        if self.delay_cycles < 1 {
            return Err(ParamError::new("delay_cycles", "must be >= 1"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.rate
    }

    pub fn ticks(&self) -> u64 {
        (self.duration * self.rate).round() as u64
    }

    /// Scheduled start of `tick`, ns.
    pub fn tick_time_ns(&self, tick: u64) -> u64 {
        (tick as f64 * 1e9 / self.rate).round() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkModeKind {
    Fixed,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalkConfig {
    pub mode: WalkModeKind,
    /// Stance belt speed in fixed mode, m/s.
    pub fixed_speed: f64,
    /// Lumped mass used by the velocity estimator, kg.
    pub user_mass: f64,
    /// Walking-speed clamp, m/s.
    pub speed_limit: f64,
    /// Let the estimated speed go negative (backward walking).
    pub allow_reverse: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            mode: WalkModeKind::Fixed,
            fixed_speed: 0.4,
            user_mass: 80.0,
            speed_limit: 0.5,
            allow_reverse: false,
        }
    }
}

impl WalkConfig {
    pub fn walk_mode(&self) -> WalkMode {
        match self.mode {
            WalkModeKind::Fixed => WalkMode::Fixed {
                speed: self.fixed_speed,
            },
            WalkModeKind::Dynamic => WalkMode::Dynamic,
        }
    }

    pub fn initial_state(&self) -> Result<WalkState, ParamError> {
        let mut state = WalkState::new(self.user_mass, self.speed_limit, self.walk_mode())?;
        state.reverse = self.allow_reverse;
        Ok(state)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BridgeConfig {
    /// Send one outbound message every `decimation` ticks.
    pub decimation: u64,
    /// Listen address of the `serve` endpoint.
    pub address: String,
    /// Terrain served by the in-process loopback when the terrain is external.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loopback: Option<TerrainProfile>,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self {
            decimation: 10,
            address: "127.0.0.1:7878".to_string(),
            loopback: None,
        }
    }
}

/// Everything needed to run one closed-loop scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub seed: u64,
    #[serde(rename = "loop")]
    pub loop_config: LoopConfig,
    pub admittance: AdmittanceParams,
    pub thresholds: PhaseThresholds,
    pub walk: WalkConfig,
    pub terrain: TerrainProfile,
    pub plant: PlantParams,
    pub human: HumanParams,
    pub bridge: BridgeConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            loop_config: LoopConfig::default(),
            admittance: AdmittanceParams::default(),
            thresholds: PhaseThresholds::default(),
            walk: WalkConfig::default(),
            terrain: TerrainProfile::default(),
            plant: PlantParams::default(),
            human: HumanParams::default(),
            bridge: BridgeConfig::default(),
        }
    }
}

impl ScenarioConfig {
    /// Walk-start/walk-stop trial with the dynamic velocity estimator.
    pub fn dynamic_walk() -> Self {
        let mut cfg = Self::default();
        cfg.walk.mode = WalkModeKind::Dynamic;
        cfg.loop_config.duration = 14.0;
        cfg.human.intent = crate::plant::IntentProfile {
            speed: 0.4,
            start: 0.5,
            ramp_up: 1.5,
            stop: Some(8.0),
            ramp_down: 1.5,
        };
        cfg.human.step_stop = Some(9.5);
        cfg
    }

    /// Fixed-speed walk on a constant incline.
    pub fn incline(slope: f64) -> Self {
        Self {
            terrain: TerrainProfile::Stair { slope },
            ..Self::default()
        }
    }

    /// The walker's terrain: its own override, else the loopback terrain when
    /// the scenario terrain is external, else the scenario terrain.
    pub fn walker_terrain(&self) -> TerrainProfile {
        match (&self.human.perceived_terrain, &self.terrain, &self.bridge.loopback) {
            (Some(t), _, _) => t.clone(),
            (None, TerrainProfile::External { .. }, Some(served)) => served.clone(),
            (None, t, _) => t.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        self.loop_config.validate().map_err(|e| e.under("loop"))?;
        self.admittance.validate().map_err(|e| e.under("admittance"))?;
        self.admittance
            .check_step(self.loop_config.dt())
            .map_err(|e| if e.key == "admittance" { e } else { e.under("admittance") })?;
        self.thresholds.validate().map_err(|e| e.under("thresholds"))?;
        self.walk.initial_state().map_err(|e| e.under("walk"))?;
        self.terrain.validate().map_err(|e| e.under("terrain"))?;
        self.plant.validate().map_err(|e| e.under("plant"))?;
        self.human.validate().map_err(|e| e.under("human"))?;
        if self.bridge.decimation < 1 {
            return Err(ParamError::new("bridge.decimation", "must be >= 1"));
        }
        if let Some(served) = &self.bridge.loopback {
            served.validate().map_err(|e| e.under("bridge.loopback"))?;
        }

        let (xlo, xhi) = self.plant.x_limits;
        let (zlo, zhi) = self.plant.z_limits;
        if !(xlo..=xhi).contains(&self.human.front_x) {
            return Err(ParamError::new(
                "human.front_x",
                format!("foothold {} m lies outside the x workspace [{xlo}, {xhi}]", self.human.front_x),
            ));
        }
        let terrain = self.walker_terrain();
        for (foot, x) in FootId::BOTH.into_iter().zip(self.human.initial_positions()) {
            if !(xlo..=xhi).contains(&x) {
                return Err(ParamError::new(
                    "human.initial_x",
                    format!("foot {foot} starts at x = {x:.3} m, outside [{xlo}, {xhi}]"),
                ));
            }
            let z = terrain.ground_height(foot, x, 0).z;
            if !(zlo..=zhi).contains(&z) {
                return Err(ParamError::new(
                    "terrain",
                    format!("ground under foot {foot} at z = {z:.3} m is outside [{zlo}, {zhi}]"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
struct FootChannel {
    id: FootId,
    tracker: PhaseTracker,
    admittance: [AxisAdmittanceState; 2],
    axes: [GantryAxis; 2],
    sensors: [ForceSensor; 2],
    /// Footstep index of the ground this foot stands on.
    step_index: usize,
    swing_ground: SwingGround,
    measured: Planar,
    desired: Planar,
    ground: GroundHeight,
}

impl FootChannel {
    fn position(&self) -> Planar {
        Planar::new(self.axes[0].position, self.axes[1].position)
    }

    fn velocity(&self) -> Planar {
        Planar::new(self.axes[0].velocity, self.axes[1].velocity)
    }

    fn phase(&self) -> GaitPhase {
        self.tracker.phase()
    }
}

/// Timing of one tick as seen by the pacing layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickTiming {
    /// When the force sample was read, ns since start.
    pub read_ns: u64,
    pub jitter_ns: i64,
    pub overrun: bool,
}

/// The closed loop: walker, sensors, controllers and gantries of both feet.
pub struct Simulation {
    config: ScenarioConfig,
    dt: f64,
    tick: u64,
    feet: [FootChannel; 2],
    walk: WalkState,
    terrain: TerrainProfile,
    human: HumanModel,
    next_step: usize,
    link: Option<Box<dyn TerrainLink + Send>>,
    tap: Option<TelemetryTap>,
    read_times: VecDeque<u64>,
    events: Vec<ContactEvent>,
    stats: RunStats,
}

impl Simulation {
    /// Validates the configuration and places both feet standing on the ground.
    /// An external terrain with a configured loopback gets its link here.
    pub fn new(config: ScenarioConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let dt = config.loop_config.dt();
        let delay = config.loop_config.delay_cycles;
        let walker_terrain = config.walker_terrain();
        let human = HumanModel::new(config.human.clone(), &walker_terrain).map_err(|e| e.under("human"))?;
        let start = config.human.initial_positions();
        let limit = Some(config.plant.velocity_limit);

        let mut terrain = config.terrain.clone();
        // An external service has not spoken yet; seed it with what the walker stands on.
        if let Some(heights) = terrain.external_heights_mut() {
            if config.bridge.loopback.is_some() {
                for foot in FootId::BOTH {
                    heights.set(foot, walker_terrain.ground_height(foot, start[foot.index()], 0).z);
                }
            }
        }

        let mut feet = Vec::with_capacity(2);
        for foot in FootId::BOTH {
            let x = start[foot.index()];
            let ground = terrain.ground_height(foot, x, 0);
            let axis = |limits, pos| {
                GantryAxis::new(&config.plant.axis(limits, delay), pos).map_err(|e| e.under("plant"))
            };
            let stream = 2 * foot.0 as u64;
            feet.push(FootChannel {
                id: foot,
                tracker: PhaseTracker::new(foot, GaitPhase::Stance),
                admittance: [AxisAdmittanceState::new(limit); 2],
                axes: [axis(config.plant.x_limits, x)?, axis(config.plant.z_limits, ground.z)?],
                sensors: [
                    ForceSensor::new(config.plant.sensor, config.seed, stream),
                    ForceSensor::new(config.plant.sensor, config.seed, stream + 1),
                ],
                step_index: 0,
                swing_ground: SwingGround::default(),
                measured: Planar::ZERO,
                desired: Planar::ZERO,
                ground,
            });
        }
        let feet: [FootChannel; 2] = feet.try_into().map_err(|_| ParamError::new("feet", "two feet expected"))?;

        let mut walk = config.walk.initial_state().map_err(|e| e.under("walk"))?;
        if terrain.compensates_slope() {
            let (front, rear) = if feet[0].position().x >= feet[1].position().x {
                (&feet[0], &feet[1])
            } else {
                (&feet[1], &feet[0])
            };
            let rec = FootstepRecord {
                forefoot: Planar::new(front.position().x, front.ground.z),
                rearfoot: Planar::new(rear.position().x, rear.ground.z),
                step_index: 0,
            };
            walk.current_slope = update_slope(&rec).unwrap_or(0.0);
        }

        let link: Option<Box<dyn TerrainLink + Send>> = match (&terrain, &config.bridge.loopback) {
            (TerrainProfile::External { .. }, Some(served)) => Some(Box::new(LoopbackLink::new(served.clone())?)),
            _ => None,
        };

        let mut sim = Self {
            dt,
            tick: 0,
            feet,
            walk,
            terrain,
            human,
            next_step: 1,
            link,
            tap: None,
            read_times: VecDeque::with_capacity(delay + 1),
            events: Vec::new(),
            stats: RunStats::default(),
            config,
        };
        sim.prime_link();
        Ok(sim)
    }

    /// Replaces the terrain link (for example with a network endpoint).
    pub fn with_link(mut self, link: Box<dyn TerrainLink + Send>) -> Self {
        self.link = Some(link);
        self.prime_link();
        self
    }

    pub fn with_tap(mut self, tap: TelemetryTap) -> Self {
        self.tap = Some(tap);
        self
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn walk_state(&self) -> &WalkState {
        &self.walk
    }

    pub fn events(&self) -> &[ContactEvent] {
        &self.events
    }

    pub fn stats(&self) -> RunStats {
        let mut stats = self.stats;
        stats.tap_dropped = self.tap.as_ref().map_or(0, TelemetryTap::dropped);
        stats
    }

    fn outbound(&self) -> OutboundMessage {
        let avatar = self.walk.avatar();
        OutboundMessage {
            t: self.tick as f64 * 1000.0 / self.config.loop_config.rate,
            feet: [0, 1].map(|i| FootPose {
                id: self.feet[i].id,
                x: self.feet[i].position().x,
                z: self.feet[i].position().z,
                phase: self.feet[i].phase(),
            }),
            avatar_forward: avatar.x,
            avatar_height: avatar.z,
            walk_velocity: self.walk.walk_velocity,
        }
    }

    fn prime_link(&mut self) {
        let msg = self.outbound();
        if let Some(link) = self.link.as_mut() {
            if link.send(&msg).is_err() {
                self.stats.bridge_errors += 1;
            }
        }
    }

    fn apply_inbound(&mut self) {
        let Some(link) = self.link.as_mut() else {
            return;
        };
        for msg in link.poll() {
            if let InboundMessage::TerrainHeight { foot, height, .. } = msg {
                if let Some(heights) = self.terrain.external_heights_mut() {
                    heights.set(foot, height);
                }
            }
        }
    }

    fn ground_for(&mut self, i: usize) -> GroundHeight {
        let margin = self.config.thresholds.contact_epsilon;
        let foot = &mut self.feet[i];
        match foot.phase() {
            GaitPhase::Stance => self.terrain.ground_height(foot.id, foot.position().x, foot.step_index),
            GaitPhase::Swing => foot.swing_ground.height(
                &self.terrain,
                foot.id,
                foot.position(),
                foot.step_index,
                self.next_step,
                margin,
            ),
        }
    }

    fn on_heel_strike(&mut self, i: usize) {
        self.feet[i].step_index = self.next_step;
        self.next_step += 1;
        if !self.terrain.compensates_slope() {
            return;
        }
        let other = &self.feet[1 - i];
        let other_ground = self.terrain.ground_height(other.id, other.position().x, other.step_index);
        let rec = FootstepRecord {
            forefoot: Planar::new(self.feet[i].position().x, self.feet[i].ground.z),
            rearfoot: Planar::new(other.position().x, other_ground.z),
            step_index: self.feet[i].step_index,
        };
        match update_slope(&rec) {
            Ok(m) => self.walk.current_slope = m,
            Err(_) => self.stats.degenerate_slopes += 1,
        }
    }

    /// Runs one control tick and returns its telemetry.
    pub fn step(&mut self, timing: TickTiming) -> TelemetryFrame {
        let dt = self.dt;
        let t = self.tick as f64 / self.config.loop_config.rate;
        self.apply_inbound();

        // Sense.
        let platforms = [0, 1].map(|i| FootState {
            position: self.feet[i].position(),
            velocity: self.feet[i].velocity(),
            measured_force: self.feet[i].measured,
            phase: self.feet[i].phase(),
        });
        let true_forces = self.human.forces(t, &platforms);
        for (foot, f) in self.feet.iter_mut().zip(true_forces) {
            foot.measured = Planar::new(foot.sensors[0].sense(f.x, dt), foot.sensors[1].sense(f.z, dt));
        }
        self.read_times.push_back(timing.read_ns);

        // Classify.
        for i in 0..2 {
            let ground = self.ground_for(i);
            if ground.fallback {
                self.stats.terrain_fallbacks += 1;
            }
            let foot = &mut self.feet[i];
            foot.ground = ground;
            let (pos, vel, force) = (foot.position(), foot.velocity(), foot.measured);
            let event = foot.tracker.update(pos, vel, force, ground.z, &self.config.thresholds, dt, t);
            if let Some(ev) = event {
                foot.admittance = foot.admittance.map(AxisAdmittanceState::reset);
                match ev.kind {
                    ContactKind::HeelStrike => self.on_heel_strike(i),
                    ContactKind::ToeOff => self.feet[i].swing_ground.lift(),
                }
                self.events.push(ev);
            }
        }

        // Estimate walking velocity from the stance feet.
        let in_stance = self.feet.iter().any(|f| f.phase() == GaitPhase::Stance);
        if in_stance {
            let f_grf_x: f64 = -self
                .feet
                .iter()
                .filter(|f| f.phase() == GaitPhase::Stance)
                .map(|f| f.measured.x)
                .sum::<f64>();
            let before = self.walk.faults;
            self.walk = estimate_walk_velocity(self.walk, f_grf_x, dt);
            self.stats.walk_faults += self.walk.faults - before;
        }

        // Command.
        let stance_cmd = stance_platform_command(&self.walk);
        for foot in &mut self.feet {
            foot.desired = match foot.phase() {
                GaitPhase::Stance => stance_cmd,
                GaitPhase::Swing => {
                    let mut cmd = Planar::ZERO;
                    for (k, axis) in Axis::BOTH.into_iter().enumerate() {
                        match step_admittance(&self.config.admittance, foot.admittance[k], foot.measured.get(axis), dt) {
                            Ok(next) => foot.admittance[k] = next,
                            Err(_) => self.stats.admittance_faults += 1,
                        }
                        cmd.set(axis, foot.admittance[k].desired_velocity);
                    }
                    cmd
                }
            };
        }
        if in_stance {
            self.walk = integrate_travel(self.walk, stance_cmd, dt);
        }

        // Actuate.
        for foot in &mut self.feet {
            foot.axes[0].step(foot.desired.x, dt);
            foot.axes[1].step(foot.desired.z, dt);
        }

        let delay = self.config.loop_config.delay_cycles;
        let t_start_ns = if self.read_times.len() > delay {
            self.read_times.pop_front()
        } else {
            None
        };
        let frame = TelemetryFrame {
            tick: self.tick,
            t_start_ns,
            t_end_ns: timing.read_ns,
            jitter_ns: timing.jitter_ns,
            overrun: timing.overrun,
            feet: [0, 1].map(|i| {
                let f = &self.feet[i];
                FootTelemetry {
                    phase: f.phase(),
                    measured_force: f.measured,
                    desired_velocity: f.desired,
                    velocity: f.velocity(),
                    position: f.position(),
                    ground_z: f.ground.z,
                    limit: f.axes.iter().any(|a| a.limit_switch),
                    ground_fallback: f.ground.fallback,
                }
            }),
            walk: WalkTelemetry {
                walk_velocity: self.walk.walk_velocity,
                d_x: self.walk.travel.x,
                d_z: self.walk.travel.z,
                slope: self.walk.current_slope,
            },
        };
        if timing.overrun {
            self.stats.overruns += 1;
        }

        self.tick += 1;
        if self.tick.is_multiple_of(self.config.bridge.decimation) {
            let msg = self.outbound();
            if let Some(link) = self.link.as_mut() {
                if link.send(&msg).is_err() {
                    self.stats.bridge_errors += 1;
                }
            }
        }
        if let Some(tap) = self.tap.as_mut() {
            tap.offer(&frame);
        }
        frame
    }

    /// Runs the configured duration, handing each frame to `sink`.
    pub fn run_with(&mut self, mut sink: impl FnMut(&TelemetryFrame)) {
        let cfg = self.config.loop_config;
        let ticks = cfg.ticks();
        match cfg.mode {
            LoopMode::Deterministic => {
                for _ in 0..ticks {
                    let timing = TickTiming {
                        read_ns: cfg.tick_time_ns(self.tick),
                        jitter_ns: 0,
                        overrun: false,
                    };
                    let frame = self.step(timing);
                    sink(&frame);
                }
            }
            LoopMode::WallClock => {
                let origin = Instant::now();
                let period = cfg.tick_time_ns(1);
                for _ in 0..ticks {
                    let scheduled = cfg.tick_time_ns(self.tick);
                    let mut now = origin.elapsed().as_nanos() as u64;
                    if now < scheduled {
                        std::thread::sleep(Duration::from_nanos(scheduled - now));
                        now = origin.elapsed().as_nanos() as u64;
                    }
                    let timing = TickTiming {
                        read_ns: now,
                        jitter_ns: now as i64 - scheduled as i64,
                        overrun: now > scheduled + period,
                    };
                    let mut frame = self.step(timing);
                    frame.t_end_ns = origin.elapsed().as_nanos() as u64;
                    sink(&frame);
                }
            }
        }
    }

    /// Runs the configured duration and collects the log.
    pub fn run(mut self) -> TelemetryLog {
        let mut frames = Vec::with_capacity(self.config.loop_config.ticks() as usize);
        self.run_with(|f| frames.push(*f));
        TelemetryLog {
            rate: self.config.loop_config.rate,
            frames,
            stats: self.stats(),
            events: self.events,
        }
    }
}

/// Validates and runs a scenario; nothing runs when validation fails.
pub fn run_scenario(config: &ScenarioConfig) -> Result<TelemetryLog, ScenarioError> {
    Ok(Simulation::new(config.clone())?.run())
}
