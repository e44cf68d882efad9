use std::collections::VecDeque;

use super::protocol::{decode_inbound, decode_outbound, encode, encode_inbound};
use super::{BridgeError, InboundMessage, OutboundMessage, TerrainLink};
use crate::gait::GaitPhase;
use crate::planar::Planar;
use crate::terrain::{SwingGround, TerrainProfile};

/// In-process terrain service answering each outbound message with the
/// terrain height under each foot and edge-triggered contact changes.
#[derive(Debug, Clone)]
pub struct LoopbackService {
    profile: TerrainProfile,
    contact: [bool; 2],
    last_phase: [Option<GaitPhase>; 2],
    step_index: [usize; 2],
    swing_ground: [SwingGround; 2],
    next_step: usize,
}

/// Height a foot must rise above both its old and upcoming step before the
/// service reports the upcoming one, m.
pub const SWING_CLEARANCE: f64 = 0.002;

impl LoopbackService {
    pub fn new(profile: TerrainProfile) -> Result<Self, BridgeError> {
        profile.validate().map_err(|e| BridgeError::InvalidField {
            field: format!("terrain.{}", e.key),
            reason: e.message,
        })?;
        Ok(Self {
            profile,
            contact: [false; 2],
            last_phase: [None; 2],
            step_index: [0; 2],
            swing_ground: [SwingGround::default(); 2],
            next_step: 1,
        })
    }

    pub fn profile(&self) -> &TerrainProfile {
        &self.profile
    }

    pub fn handle(&mut self, msg: &OutboundMessage) -> Vec<InboundMessage> {
        let mut replies = Vec::with_capacity(4);
        for pose in &msg.feet {
            let i = pose.id.index().min(1);
            match (self.last_phase[i], pose.phase) {
                (Some(GaitPhase::Swing), GaitPhase::Stance) => {
                    self.step_index[i] = self.next_step;
                    self.next_step += 1;
                }
                (Some(GaitPhase::Stance), GaitPhase::Swing) => self.swing_ground[i].lift(),
                _ => {}
            }
            self.last_phase[i] = Some(pose.phase);
            let height = match pose.phase {
                GaitPhase::Stance => self.profile.ground_height(pose.id, pose.x, self.step_index[i]),
                GaitPhase::Swing => self.swing_ground[i].height(
                    &self.profile,
                    pose.id,
                    Planar::new(pose.x, pose.z),
                    self.step_index[i],
                    self.next_step,
                    SWING_CLEARANCE,
                ),
            }
            .z;
            replies.push(InboundMessage::TerrainHeight {
                t: msg.t,
                foot: pose.id,
                height,
            });
            let touching = pose.z <= height;
            if touching != self.contact[i] {
                self.contact[i] = touching;
                replies.push(InboundMessage::GroundContact {
                    t: msg.t,
                    foot: pose.id,
                    contact: touching,
                });
            }
        }
        replies
    }

    /// Wire-level form of [`handle`](Self::handle).
    pub fn handle_line(&mut self, line: &str) -> Result<Vec<String>, BridgeError> {
        let msg = decode_outbound(line)?;
        self.handle(&msg).iter().map(encode_inbound).collect()
    }
}

/// Connects a simulation to a [`LoopbackService`] through the text protocol.
#[derive(Debug)]
pub struct LoopbackLink {
    service: LoopbackService,
    pending: VecDeque<InboundMessage>,
}

impl LoopbackLink {
    pub fn new(profile: TerrainProfile) -> Result<Self, BridgeError> {
        Ok(Self {
            service: LoopbackService::new(profile)?,
            pending: VecDeque::new(),
        })
    }
}

impl TerrainLink for LoopbackLink {
    fn send(&mut self, msg: &OutboundMessage) -> Result<(), BridgeError> {
        for line in self.service.handle_line(&encode(msg)?)? {
            self.pending.push_back(decode_inbound(&line)?);
        }
        Ok(())
    }

    fn poll(&mut self) -> Vec<InboundMessage> {
        self.pending.drain(..).collect()
    }
}

/// Convenience constructor matching the service's role in the protocol.
pub fn loopback_service(profile: TerrainProfile) -> Result<LoopbackService, BridgeError> {
    LoopbackService::new(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::FootId;
    use approx::assert_relative_eq;

    fn msg(x: f64, z: f64, phase: GaitPhase) -> OutboundMessage {
        let mut m = OutboundMessage::zero();
        for f in &mut m.feet {
            f.x = x;
            f.z = z;
            f.phase = phase;
        }
        m
    }

    fn heights(replies: &[InboundMessage]) -> Vec<f64> {
        replies
            .iter()
            .filter_map(|r| match r {
                InboundMessage::TerrainHeight { height, .. } => Some(*height),
                _ => None,
            })
            .collect()
    }

    fn contacts(replies: &[InboundMessage], foot: FootId) -> Vec<bool> {
        replies
            .iter()
            .filter_map(|r| match r {
                InboundMessage::GroundContact { foot: f, contact, .. } if *f == foot => Some(*contact),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn flat_airborne_foot() {
        let mut svc = LoopbackService::new(TerrainProfile::Flat { height: 0.0 }).unwrap();
        let r = svc.handle(&msg(0.2, 0.1, GaitPhase::Swing));
        assert_eq!(heights(&r), vec![0.0, 0.0]);
        assert!(contacts(&r, FootId(0)).is_empty());
    }

    #[test]
    fn stair_height_under_foot() {
        let mut svc = LoopbackService::new(TerrainProfile::Stair { slope: 0.4 }).unwrap();
        let r = svc.handle(&msg(0.5, 0.3, GaitPhase::Swing));
        assert_relative_eq!(heights(&r)[0], 0.2);
    }

    #[test]
    fn one_contact_per_crossing() {
        let mut svc = LoopbackService::new(TerrainProfile::Flat { height: 0.0 }).unwrap();
        let mut seen = Vec::new();
        for k in 0..20 {
            let z = 0.05 - 0.005 * k as f64;
            seen.extend(contacts(&svc.handle(&msg(0.0, z, GaitPhase::Swing)), FootId(0)));
        }
        assert_eq!(seen, vec![true]);
    }

    #[test]
    fn link_round_trips_through_text() {
        let mut link = LoopbackLink::new(TerrainProfile::Stair { slope: 0.4 }).unwrap();
        link.send(&msg(0.25, 0.2, GaitPhase::Swing)).unwrap();
        let r = link.poll();
        assert_relative_eq!(heights(&r)[1], 0.1);
        assert!(link.poll().is_empty());
    }
}
