//! Multi-robot conveyor-belt sorting.
//!
//! The crate is organised around a deterministic, tick-driven world model
//! ([`sim`]) that a controller drives through decision points. On top of it sit
//! the pattern generators ([`patterns`]), the dispatching-rule strategies and
//! their search ([`strategy`]), a reset/step wire protocol for external
//! trainers ([`bridge`]) and the experiment harness ([`bench`]).

pub mod bench;
pub mod bridge;
pub mod geometry;
pub mod patterns;
pub mod sim;
pub mod strategy;

pub use geometry::Point2;
pub use patterns::{Pattern, PatternKind, PatternObject, PatternSpec};
pub use sim::{
    run_episode, validate_config, Choice, Controller, ControllerError, DecisionRequest, Episode,
    EpisodeStats, RobotSpec, SimError, World, WorldConfig,
};
pub use strategy::{Rule, StrategyCombo};
