//! Swing/stance classification of each foot platform.
//!
//! A foot enters stance when its platform reaches the virtual ground and
//! leaves it only when the user pulls the platform upward. Each foot is
//! classified from its own data; double stance needs no special handling.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::planar::{FootId, Planar};

/// Comparison slack for dwell times accumulated from fixed ticks.
const DWELL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaitPhase {
    Swing,
    Stance,
}

impl GaitPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            GaitPhase::Swing => "swing",
            GaitPhase::Stance => "stance",
        }
    }
}

impl std::str::FromStr for GaitPhase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "swing" => Ok(GaitPhase::Swing),
            "stance" => Ok(GaitPhase::Stance),
            other => Err(format!("unknown gait phase `{other}`")),
        }
    }
}

/// Planar state of one foot platform as seen by the controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootState {
    pub position: Planar,
    pub velocity: Planar,
    /// Interaction force applied by the user on the platform; `z > 0` is upward.
    pub measured_force: Planar,
    pub phase: GaitPhase,
}

impl FootState {
    pub fn at(position: Planar, phase: GaitPhase) -> Self {
        Self {
            position,
            velocity: Planar::ZERO,
            measured_force: Planar::ZERO,
            phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseThresholds {
    /// Height above the virtual ground that still counts as contact, m.
    pub contact_epsilon: f64,
    /// Upward force that disengages stance, N.
    pub liftoff_force: f64,
    /// Minimum time between phase changes, s.
    pub min_phase_dwell: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self {
            contact_epsilon: 0.002,
            liftoff_force: 20.0,
            min_phase_dwell: 0.05,
        }
    }
}

impl PhaseThresholds {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.contact_epsilon.is_finite() && self.contact_epsilon > 0.0) {
            return Err(ParamError::new("contact_epsilon", "must be finite and > 0"));
        }
        if !(self.liftoff_force.is_finite() && self.liftoff_force > 0.0) {
            return Err(ParamError::new("liftoff_force", "must be finite and > 0"));
        }
        if !(self.min_phase_dwell.is_finite() && self.min_phase_dwell >= 0.0) {
            return Err(ParamError::new("min_phase_dwell", "must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactKind {
    HeelStrike,
    ToeOff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    pub kind: ContactKind,
    pub foot: FootId,
    pub time: f64,
    pub position: Planar,
}

/// Next phase of a foot given its current phase (`foot.phase`).
pub fn classify_phase(
    foot: &FootState,
    ground_z: f64,
    thresholds: &PhaseThresholds,
    time_in_phase: f64,
) -> GaitPhase {
    if time_in_phase + DWELL_SLACK < thresholds.min_phase_dwell {
        return foot.phase;
    }
    match foot.phase {
        GaitPhase::Swing if foot.position.z <= ground_z + thresholds.contact_epsilon => {
            GaitPhase::Stance
        }
        GaitPhase::Stance if foot.measured_force.z >= thresholds.liftoff_force => GaitPhase::Swing,
        phase => phase,
    }
}

pub fn detect_event(
    prev: GaitPhase,
    next: GaitPhase,
    foot_id: FootId,
    foot: &FootState,
    time: f64,
) -> Option<ContactEvent> {
    let kind = match (prev, next) {
        (GaitPhase::Swing, GaitPhase::Stance) => ContactKind::HeelStrike,
        (GaitPhase::Stance, GaitPhase::Swing) => ContactKind::ToeOff,
        _ => return None,
    };
    Some(ContactEvent {
        kind,
        foot: foot_id,
        time,
        position: foot.position,
    })
}

/// Incremental per-foot phase machine.
#[derive(Debug, Clone)]
pub struct PhaseTracker {
    foot: FootId,
    phase: GaitPhase,
    ticks_in_phase: u64,
    /// Treat the initial phase as already settled.
    settled: bool,
}

impl PhaseTracker {
    pub fn new(foot: FootId, initial: GaitPhase) -> Self {
        Self {
            foot,
            phase: initial,
            ticks_in_phase: 0,
            settled: true,
        }
    }

    pub fn phase(&self) -> GaitPhase {
        self.phase
    }

    pub fn time_in_phase(&self, dt: f64) -> f64 {
        if self.settled {
            f64::INFINITY
        } else {
            self.ticks_in_phase as f64 * dt
        }
    }

    /// Classifies one sample. `position` and `measured_force` come from the
    /// current tick; the returned event, if any, is stamped with `time`.
    pub fn update(
        &mut self,
        position: Planar,
        velocity: Planar,
        measured_force: Planar,
        ground_z: f64,
        thresholds: &PhaseThresholds,
        dt: f64,
        time: f64,
    ) -> Option<ContactEvent> {
        self.ticks_in_phase += 1;
        let foot = FootState {
            position,
            velocity,
            measured_force,
            phase: self.phase,
        };
        let next = classify_phase(&foot, ground_z, thresholds, self.time_in_phase(dt));
        let event = detect_event(self.phase, next, self.foot, &foot, time);
        if event.is_some() {
            self.phase = next;
            self.ticks_in_phase = 0;
            self.settled = false;
        }
        event
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn foot(z: f64, fz: f64, phase: GaitPhase) -> FootState {
        FootState {
            position: Planar::new(0.3, z),
            velocity: Planar::ZERO,
            measured_force: Planar::new(0.0, fz),
            phase,
        }
    }

    #[test]
    fn swing_touching_ground_becomes_stance() {
        let th = PhaseThresholds::default();
        assert_eq!(
            classify_phase(&foot(0.0, 0.0, GaitPhase::Swing), 0.0, &th, 1.0),
            GaitPhase::Stance
        );
    }

    #[test]
    fn upward_pull_above_threshold_leaves_stance() {
        let th = PhaseThresholds::default();
        assert_eq!(
            classify_phase(&foot(0.0, 25.0, GaitPhase::Stance), 0.0, &th, 1.0),
            GaitPhase::Swing
        );
        assert_eq!(
            classify_phase(&foot(0.0, 19.9, GaitPhase::Stance), 0.0, &th, 1.0),
            GaitPhase::Stance
        );
    }

    #[test]
    fn airborne_foot_stays_in_swing() {
        let th = PhaseThresholds::default();
        assert_eq!(
            classify_phase(&foot(0.1, 0.0, GaitPhase::Swing), 0.0, &th, 1.0),
            GaitPhase::Swing
        );
    }

    #[test]
    fn dwell_blocks_transitions() {
        let th = PhaseThresholds::default();
        assert_eq!(
            classify_phase(&foot(0.0, 0.0, GaitPhase::Swing), 0.0, &th, 0.049),
            GaitPhase::Swing
        );
        assert_eq!(
            classify_phase(&foot(0.0, 0.0, GaitPhase::Swing), 0.0, &th, 0.05),
            GaitPhase::Stance
        );
    }

    #[test]
    fn events_follow_transitions() {
        let f = foot(0.0, 0.0, GaitPhase::Swing);
        let ev = detect_event(GaitPhase::Swing, GaitPhase::Stance, FootId(0), &f, 1.5).unwrap();
        assert_eq!(ev.kind, ContactKind::HeelStrike);
        assert_eq!(ev.position, Planar::new(0.3, 0.0));
        assert!(detect_event(GaitPhase::Stance, GaitPhase::Stance, FootId(0), &f, 1.5).is_none());
        let ev = detect_event(GaitPhase::Stance, GaitPhase::Swing, FootId(1), &f, 2.0).unwrap();
        assert_eq!(ev.kind, ContactKind::ToeOff);
        assert_eq!(ev.foot, FootId(1));
    }

    #[test]
    fn tracker_respects_dwell_after_a_transition() {
        let th = PhaseThresholds::default();
        let dt = 0.001;
        let mut tr = PhaseTracker::new(FootId(0), GaitPhase::Stance);
        let up = Planar::new(0.0, 30.0);
        let ev = tr.update(Planar::ZERO, Planar::ZERO, up, 0.0, &th, dt, 0.0);
        assert_eq!(ev.map(|e| e.kind), Some(ContactKind::ToeOff));
        // Still on the ground: contact would re-trigger but the dwell holds swing.
        let mut strike_tick = None;
        for k in 1..100 {
            if let Some(e) = tr.update(Planar::ZERO, Planar::ZERO, Planar::ZERO, 0.0, &th, dt, k as f64 * dt) {
                strike_tick = Some(k);
                assert_eq!(e.kind, ContactKind::HeelStrike);
                break;
            }
        }
        assert_eq!(strike_tick, Some(50));
    }

    #[test]
    fn thresholds_validate() {
        assert!(PhaseThresholds::default().validate().is_ok());
        let bad = PhaseThresholds {
            liftoff_force: 0.0,
            ..Default::default()
        };
        assert_eq!(bad.validate().unwrap_err().key, "liftoff_force");
    }
}
