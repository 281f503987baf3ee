//! Reset/step access to the simulator over line-delimited JSON.
//!
//! A client opens a session (a TCP connection or the process's stdio), sends
//! `reset` with a pattern reference and then one `act` per decision point.
//! Ticks between decision points run inside the server, so every reply carries
//! the observation for the next robot that has to choose, the rewards accrued
//! since the previous reply and the done flag.
//!
//! ```text
//! -> {"cmd":"reset","pattern":"grid-0.15","seed":7}
//! <- {"v":1,"obs":[...],"mask":[1,1,0,...],"reward":0.0,"done":false,"info":{...}}
//! -> {"cmd":"act","slot":0}
//! <- {"v":1,"obs":[...],"mask":[...],"reward":0.53,"done":false,"info":{...}}
//! -> {"cmd":"close"}
//! <- {"v":1,"closed":true}
//! ```
//!
//! The same observation encoding is used in the other direction by
//! [`PolicyClient`], which lets a remote policy act as an in-process
//! [`Controller`](crate::sim::Controller).

mod catalog;
mod client;
mod obs;
mod protocol;
mod server;
mod session;

use thiserror::Error;

pub use catalog::PatternCatalog;
pub use client::{PolicyClient, PolicyQuery, PolicyReply, QueryInfo};
pub use obs::{obs_width, ObsVector, FEATURES_PER_SLOT, FEATURES_PER_ROBOT};
pub use protocol::{Command, ErrorReply, PatternRef, Reply, StepInfo, StepReply, PROTOCOL_VERSION};
pub use server::{serve_stdio, serve_stream, BridgeServer};
pub use session::Session;

use crate::patterns::PatternError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum BridgeError {
    #[error("malformed message: {0}")]
    Parse(String),
    #[error("unknown pattern {0:?}")]
    UnknownPattern(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("slot {slot} outside 0..{slots}")]
    SlotOutOfRange { slot: i64, slots: usize },
    #[error("episode is done; send reset")]
    ActAfterDone,
    #[error("no episode; send reset first")]
    NoEpisode,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BridgeError {
    /// Stable code sent in the `error` field of a reply.
    pub fn code(&self) -> &'static str {
        match self {
            BridgeError::Parse(_) => "parse",
            BridgeError::UnknownPattern(_) => "unknown_pattern",
            BridgeError::InvalidPattern(_) => "invalid_pattern",
            BridgeError::SlotOutOfRange { .. } => "slot_out_of_range",
            BridgeError::ActAfterDone => "act_after_done",
            BridgeError::NoEpisode => "no_episode",
            BridgeError::Sim(_) => "sim",
            BridgeError::Io(_) => "io",
        }
    }
}

impl From<PatternError> for BridgeError {
    fn from(e: PatternError) -> Self {
        BridgeError::InvalidPattern(e.to_string())
    }
}
