//! Streaming link to an external terrain/avatar service.

mod endpoint;
mod loopback;
mod protocol;

pub use endpoint::{BridgeEndpoint, QUEUE_DEPTH};
pub use loopback::{loopback_service, LoopbackLink, LoopbackService, SWING_CLEARANCE};
pub use protocol::{
    decode_inbound, decode_outbound, encode, encode_inbound, quantize, BridgeError, FootPose,
    InboundMessage, OutboundMessage, SCHEMA_VERSION,
};

/// A non-blocking connection to a terrain service.
pub trait TerrainLink {
    /// Hands one outbound message to the service.
    fn send(&mut self, msg: &OutboundMessage) -> Result<(), BridgeError>;
    /// Returns all inbound messages received since the last call.
    fn poll(&mut self) -> Vec<InboundMessage>;
}
