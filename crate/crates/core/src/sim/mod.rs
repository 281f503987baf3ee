//! Discrete-time conveyor world: belt advection, interception, the
//! pick-and-place cycle, decision points, rewards and termination.

mod config;
mod episode;
pub mod events;
pub mod kinematics;
pub mod oracle;
pub mod reward;
mod world;

use thiserror::Error;

pub use config::{validate_config, Belt, ConfigError, ConfigViolation, RobotSpec, WorldConfig};
pub use episode::{episode_stats, run_episode, Choice, Controller, ControllerError, Episode, ReplayController};
pub use events::{Event, EventBody, EventLog};
pub use kinematics::{intercept, meeting_time, Infeasible, Intercept, PnPTask};
pub use reward::{reward_of, sigmoid, RewardDomainError};
pub use world::{
    CandidateFeature, DecisionRequest, EpisodeStats, ObjectState, RobotStatus, TickReport, WasteObject, World,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("object {object}: {source}")]
    InvalidObject { object: u32, source: RewardDomainError },
    #[error("object {object} lies outside the belt strip")]
    ObjectOffBelt { object: u32 },
    #[error("duplicate object id {0}")]
    DuplicateObjectId(u32),
    #[error("step after done")]
    StepAfterDone,
    #[error("robot {robot} is busy")]
    RobotBusy { robot: usize },
    #[error("object {object} is not a candidate of robot {robot}")]
    NotACandidate { robot: usize, object: u32 },
    #[error("no robot with index {0}")]
    NoSuchRobot(usize),
    #[error("no decision is pending")]
    NoPendingDecision,
    #[error("slot {slot} out of range for {n_candidates} candidates")]
    InvalidSlot { slot: usize, n_candidates: usize },
    #[error(transparent)]
    Controller(#[from] ControllerError),
}
