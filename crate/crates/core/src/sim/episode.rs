use thiserror::Error;

use super::events::EventLog;
use super::world::{DecisionRequest, EpisodeStats, World};
use super::{SimError, WorldConfig};
use crate::patterns::Pattern;

/// A controller's answer at a decision point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    /// Index into [`DecisionRequest::candidates`].
    Pick(usize),
    /// Leave the robot idle for this tick.
    Noop,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("controller failed: {0}")]
pub struct ControllerError(pub String);

impl ControllerError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

/// Anything that maps decision requests to choices: a dispatching rule, a
/// learned policy, a remote client.
pub trait Controller {
    fn decide(&mut self, request: &DecisionRequest) -> Result<Choice, ControllerError>;
}

impl<C: Controller + ?Sized> Controller for &mut C {
    fn decide(&mut self, request: &DecisionRequest) -> Result<Choice, ControllerError> {
        (**self).decide(request)
    }
}

impl<C: Controller + ?Sized> Controller for Box<C> {
    fn decide(&mut self, request: &DecisionRequest) -> Result<Choice, ControllerError> {
        (**self).decide(request)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub stats: EpisodeStats,
    pub log: EventLog,
}

/// Drives one episode to completion.
pub fn run_episode<C: Controller + ?Sized>(
    cfg: &WorldConfig,
    pattern: &Pattern,
    controller: &mut C,
) -> Result<Episode, SimError> {
    let world = drive(World::new(cfg, pattern)?, controller)?;
    Ok(Episode {
        stats: world.stats(),
        log: world.into_log(),
    })
}

/// Same as [`run_episode`] without recording an event log.
pub fn episode_stats<C: Controller + ?Sized>(
    cfg: &WorldConfig,
    pattern: &Pattern,
    controller: &mut C,
) -> Result<EpisodeStats, SimError> {
    let mut world = World::new(cfg, pattern)?;
    world.set_logging(false);
    Ok(drive(world, controller)?.stats())
}

fn drive<C: Controller + ?Sized>(mut world: World, controller: &mut C) -> Result<World, SimError> {
    while let Some(req) = world.next_decision()? {
        let choice = controller.decide(&req)?;
        world.resolve(choice)?;
    }
    Ok(world)
}

/// Replays the decisions recorded in an event log.
#[derive(Debug, Clone)]
pub struct ReplayController {
    decisions: std::vec::IntoIter<(usize, Option<usize>)>,
}

impl ReplayController {
    pub fn new(log: &EventLog) -> Self {
        Self {
            decisions: log.decisions().collect::<Vec<_>>().into_iter(),
        }
    }
}

impl Controller for ReplayController {
    fn decide(&mut self, request: &DecisionRequest) -> Result<Choice, ControllerError> {
        match self.decisions.next() {
            Some((robot, _)) if robot != request.robot_index => Err(ControllerError::new(format!(
                "replay diverged: log expects robot {robot}, world asks robot {}",
                request.robot_index
            ))),
            Some((_, slot)) => Ok(slot.map_or(Choice::Noop, Choice::Pick)),
            None => Err(ControllerError::new("replay log exhausted")),
        }
    }
}
