//! Newline-delimited JSON messages, schema version 1.
//!
//! Outbound (control stack to terrain service):
//!
//! ```text
//! {"v":1,"t":<ms>,"feet":[{"id":0,"x":<m>,"z":<m>,"ph":"swing"|"stance"},{"id":1,...}],
//!  "avx":<avatar forward m>,"avz":<avatar height m>,"wv":<walk velocity m/s>}
//! ```
//!
//! Inbound (terrain service to control stack):
//!
//! ```text
//! {"v":1,"t":<ms>,"kind":"height","id":<foot>,"h":<m>}
//! {"v":1,"t":<ms>,"kind":"contact","id":<foot>,"c":<bool>}
//! ```
//!
//! Numbers carry at most nine significant digits.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::gait::GaitPhase;
use crate::planar::FootId;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum BridgeError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("unsupported schema version {0}")]
    UnknownVersion(String),
    #[error("unknown message kind `{0}`")]
    UnknownKind(String),
    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("field `{0}` is not finite")]
    NonFinite(String),
    #[error("bridge i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootPose {
    pub id: FootId,
    pub x: f64,
    pub z: f64,
    pub phase: GaitPhase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutboundMessage {
    /// Milliseconds since the start of the run.
    pub t: f64,
    pub feet: [FootPose; 2],
    /// Avatar forward travel `-d_x`, m.
    pub avatar_forward: f64,
    /// Avatar height `-d_z`, m.
    pub avatar_height: f64,
    pub walk_velocity: f64,
}

impl OutboundMessage {
    /// All-zero message with both feet in swing.
    pub fn zero() -> Self {
        let pose = |id| FootPose {
            id,
            x: 0.0,
            z: 0.0,
            phase: GaitPhase::Swing,
        };
        Self {
            t: 0.0,
            feet: [pose(FootId::RIGHT), pose(FootId::LEFT)],
            avatar_forward: 0.0,
            avatar_height: 0.0,
            walk_velocity: 0.0,
        }
    }

    /// The message as it reads back after encoding.
    pub fn quantized(&self) -> Self {
        let q = quantize;
        Self {
            t: q(self.t),
            feet: self.feet.map(|f| FootPose {
                x: q(f.x),
                z: q(f.z),
                ..f
            }),
            avatar_forward: q(self.avatar_forward),
            avatar_height: q(self.avatar_height),
            walk_velocity: q(self.walk_velocity),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InboundMessage {
    GroundContact { t: f64, foot: FootId, contact: bool },
    TerrainHeight { t: f64, foot: FootId, height: f64 },
}

/// Rounds to nine significant digits; zero of either sign becomes `+0`.
pub fn quantize(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

fn put_number(out: &mut String, field: &str, v: f64) -> Result<(), BridgeError> {
    if !v.is_finite() {
        return Err(BridgeError::NonFinite(field.to_string()));
    }
    let _ = write!(out, "{}", quantize(v));
    Ok(())
}

/// One newline-terminated JSON line.
pub fn encode(msg: &OutboundMessage) -> Result<String, BridgeError> {
    let mut out = String::with_capacity(160);
    let _ = write!(out, "{{\"v\":{SCHEMA_VERSION},\"t\":");
    put_number(&mut out, "t", msg.t)?;
    out.push_str(",\"feet\":[");
    for (i, f) in msg.feet.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{{\"id\":{},\"x\":", f.id.0);
        put_number(&mut out, "feet.x", f.x)?;
        out.push_str(",\"z\":");
        put_number(&mut out, "feet.z", f.z)?;
        let _ = write!(out, ",\"ph\":\"{}\"}}", f.phase.as_str());
    }
    out.push_str("],\"avx\":");
    put_number(&mut out, "avx", msg.avatar_forward)?;
    out.push_str(",\"avz\":");
    put_number(&mut out, "avz", msg.avatar_height)?;
    out.push_str(",\"wv\":");
    put_number(&mut out, "wv", msg.walk_velocity)?;
    out.push_str("}\n");
    Ok(out)
}

pub fn encode_inbound(msg: &InboundMessage) -> Result<String, BridgeError> {
    let mut out = String::with_capacity(64);
    let _ = write!(out, "{{\"v\":{SCHEMA_VERSION},\"t\":");
    match *msg {
        InboundMessage::TerrainHeight { t, foot, height } => {
            put_number(&mut out, "t", t)?;
            let _ = write!(out, ",\"kind\":\"height\",\"id\":{},\"h\":", foot.0);
            put_number(&mut out, "h", height)?;
        }
        InboundMessage::GroundContact { t, foot, contact } => {
            put_number(&mut out, "t", t)?;
            let _ = write!(out, ",\"kind\":\"contact\",\"id\":{},\"c\":{contact}", foot.0);
        }
    }
    out.push_str("}\n");
    Ok(out)
}

fn parse_object(line: &str) -> Result<Map<String, Value>, BridgeError> {
    match serde_json::from_str::<Value>(line.trim_end()) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(BridgeError::Malformed("expected a JSON object".into())),
        Err(e) => Err(BridgeError::Malformed(e.to_string())),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value, BridgeError> {
    obj.get(name).ok_or_else(|| BridgeError::MissingField(name.to_string()))
}

fn number(obj: &Map<String, Value>, name: &str) -> Result<f64, BridgeError> {
    let v = field(obj, name)?.as_f64().ok_or_else(|| BridgeError::InvalidField {
        field: name.to_string(),
        reason: "expected a number".into(),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BridgeError::NonFinite(name.to_string()))
    }
}

fn foot_id(obj: &Map<String, Value>) -> Result<FootId, BridgeError> {
    match field(obj, "id")?.as_u64() {
        Some(id @ 0..=1) => Ok(FootId(id as u8)),
        _ => Err(BridgeError::InvalidField {
            field: "id".into(),
            reason: "expected foot 0 or 1".into(),
        }),
    }
}

fn check_version(obj: &Map<String, Value>) -> Result<(), BridgeError> {
    let v = field(obj, "v")?;
    if v.as_u64() == Some(SCHEMA_VERSION) {
        Ok(())
    } else {
        Err(BridgeError::UnknownVersion(v.to_string()))
    }
}

pub fn decode_inbound(line: &str) -> Result<InboundMessage, BridgeError> {
    let obj = parse_object(line)?;
    check_version(&obj)?;
    let t = number(&obj, "t")?;
    let kind = field(&obj, "kind")?
        .as_str()
        .ok_or_else(|| BridgeError::InvalidField {
            field: "kind".into(),
            reason: "expected a string".into(),
        })?;
    match kind {
        "height" => Ok(InboundMessage::TerrainHeight {
            t,
            foot: foot_id(&obj)?,
            height: number(&obj, "h")?,
        }),
        "contact" => Ok(InboundMessage::GroundContact {
            t,
            foot: foot_id(&obj)?,
            contact: field(&obj, "c")?.as_bool().ok_or_else(|| BridgeError::InvalidField {
                field: "c".into(),
                reason: "expected a boolean".into(),
            })?,
        }),
        other => Err(BridgeError::UnknownKind(other.to_string())),
    }
}

pub fn decode_outbound(line: &str) -> Result<OutboundMessage, BridgeError> {
    let obj = parse_object(line)?;
    check_version(&obj)?;
    let feet_value = field(&obj, "feet")?.as_array().ok_or_else(|| BridgeError::InvalidField {
        field: "feet".into(),
        reason: "expected an array".into(),
    })?;
    if feet_value.len() != 2 {
        return Err(BridgeError::InvalidField {
            field: "feet".into(),
            reason: format!("expected 2 entries, found {}", feet_value.len()),
        });
    }
    let mut feet = OutboundMessage::zero().feet;
    for (slot, value) in feet.iter_mut().zip(feet_value) {
        let f = value.as_object().ok_or_else(|| BridgeError::InvalidField {
            field: "feet".into(),
            reason: "expected objects".into(),
        })?;
        let phase = field(f, "ph")?
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| BridgeError::InvalidField {
                field: "ph".into(),
                reason: "expected \"swing\" or \"stance\"".into(),
            })?;
        *slot = FootPose {
            id: foot_id(f)?,
            x: number(f, "x")?,
            z: number(f, "z")?,
            phase,
        };
    }
    Ok(OutboundMessage {
        t: number(&obj, "t")?,
        feet,
        avatar_forward: number(&obj, "avx")?,
        avatar_height: number(&obj, "avz")?,
        walk_velocity: number(&obj, "wv")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_fixture() {
        let line = encode(&OutboundMessage::zero()).unwrap();
        assert_eq!(
            line,
            "{\"v\":1,\"t\":0,\"feet\":[{\"id\":0,\"x\":0,\"z\":0,\"ph\":\"swing\"},{\"id\":1,\"x\":0,\"z\":0,\"ph\":\"swing\"}],\"avx\":0,\"avz\":0,\"wv\":0}\n"
        );
    }

    #[test]
    fn round_trip() {
        let mut m = OutboundMessage::zero();
        m.t = 1234.0;
        m.feet[0].x = 0.123456789123;
        m.feet[1].phase = GaitPhase::Stance;
        m.avatar_forward = 3.5;
        m.avatar_height = -0.25;
        m.walk_velocity = 0.4;
        let back = decode_outbound(&encode(&m).unwrap()).unwrap();
        assert_eq!(back, m.quantized());
        assert_eq!(back.feet[0].x, 0.123456789);
    }

    #[test]
    fn nan_is_rejected() {
        let mut m = OutboundMessage::zero();
        m.avatar_forward = f64::NAN;
        assert!(matches!(encode(&m), Err(BridgeError::NonFinite(_))));
    }

    #[test]
    fn inbound_fixtures() {
        assert_eq!(
            decode_inbound(r#"{"v":1,"t":5,"kind":"height","id":0,"h":0.05}"#).unwrap(),
            InboundMessage::TerrainHeight {
                t: 5.0,
                foot: FootId(0),
                height: 0.05
            }
        );
        assert_eq!(
            decode_inbound(r#"{"v":1,"t":5,"kind":"contact","id":1,"c":true}"#).unwrap(),
            InboundMessage::GroundContact {
                t: 5.0,
                foot: FootId(1),
                contact: true
            }
        );
    }

    #[test]
    fn inbound_errors_are_distinct() {
        assert!(matches!(decode_inbound("not json"), Err(BridgeError::Malformed(_))));
        assert!(matches!(
            decode_inbound(r#"{"v":1,"t":5,"kind":"height","id":0}"#),
            Err(BridgeError::MissingField(f)) if f == "h"
        ));
        assert!(matches!(
            decode_inbound(r#"{"v":2,"t":5,"kind":"height","id":0,"h":0}"#),
            Err(BridgeError::UnknownVersion(_))
        ));
        assert!(matches!(
            decode_inbound(r#"{"v":1,"t":5,"kind":"wind","id":0}"#),
            Err(BridgeError::UnknownKind(k)) if k == "wind"
        ));
    }

    #[test]
    fn inbound_encoding_round_trips() {
        let m = InboundMessage::TerrainHeight {
            t: 12.0,
            foot: FootId(1),
            height: -0.125,
        };
        assert_eq!(decode_inbound(&encode_inbound(&m).unwrap()).unwrap(), m);
    }
}
