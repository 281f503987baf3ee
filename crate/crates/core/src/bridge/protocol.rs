use serde::{Deserialize, Serialize};

use crate::patterns::{Pattern, PatternSpec};
use crate::sim::EpisodeStats;

pub const PROTOCOL_VERSION: u32 = 1;

/// Client to server message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Reset {
        pattern: PatternRef,
        #[serde(default)]
        seed: Option<u64>,
    },
    Act {
        slot: i64,
    },
    Close,
}

/// A catalog name, an inline pattern or a generator spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternRef {
    Name(String),
    Inline(Pattern),
    Spec(PatternSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub sim_time: f64,
    /// Robot the observation belongs to; `null` once done.
    pub deciding_robot: Option<usize>,
    pub n_picked: usize,
    pub n_missed: usize,
    /// The action just applied was a masked slot.
    pub noop: bool,
    /// Object ids behind the unmasked slots, in slot order.
    pub candidate_ids: Vec<u32>,
    /// Final statistics, present only when done.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<EpisodeStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReply {
    pub v: u32,
    pub obs: Vec<f64>,
    pub mask: Vec<u8>,
    /// Rewards emitted since the previous reply.
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub v: u32,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reply {
    Step(StepReply),
    Error(ErrorReply),
    Closed { v: u32, closed: bool },
}

impl Reply {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("reply serialization")
    }
}
