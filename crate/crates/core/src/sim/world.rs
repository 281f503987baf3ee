use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::config::{Belt, WorldConfig, GEOM_EPS};
use super::events::{Event, EventBody, EventLog};
use super::kinematics::{intercept, PnPTask};
use super::reward::reward_of;
use super::{Choice, SimError};
use crate::geometry::Point2;
use crate::patterns::Pattern;

/// Slack for comparing the tick clock against event times.
const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectState {
    OnBelt,
    Targeted,
    Picked,
    Missed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WasteObject {
    pub id: u32,
    /// Along-belt position at time zero.
    pub x_start: f64,
    pub x: f64,
    pub y: f64,
    pub area_cm2: f64,
    pub p_detection: f64,
    pub p_grasp: f64,
    pub reward_r: f64,
    pub state: ObjectState,
}

impl WasteObject {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    fn unresolved(&self) -> bool {
        matches!(self.state, ObjectState::OnBelt | ObjectState::Targeted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateFeature {
    pub object_id: u32,
    pub x_rel: f64,
    pub y_rel: f64,
    pub t_process: f64,
    pub reward_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotStatus {
    pub busy: bool,
    /// Seconds until the robot is back at rest, 0 when idle.
    pub t_available: f64,
}

/// What a controller sees at a decision point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRequest {
    pub robot_index: usize,
    pub robot_base: Point2,
    pub sim_time: f64,
    /// Feasible objects by descending belt progress, at most `action_slots`.
    pub candidates: Vec<CandidateFeature>,
    /// Status of every robot in ring order starting with the deciding robot.
    pub robots: Vec<RobotStatus>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub n_total: usize,
    pub n_picked: usize,
    pub n_missed: usize,
    pub completion_time: f64,
    pub picks_per_minute: f64,
    /// Sum of picked object rewards over the sum of all object rewards.
    pub reward_weighted_rate: f64,
    pub picked_reward: f64,
    pub total_return: f64,
}

impl EpisodeStats {
    pub fn picked_fraction(&self) -> f64 {
        if self.n_total == 0 {
            1.0
        } else {
            self.n_picked as f64 / self.n_total as f64
        }
    }

    /// Picked object reward per minute of episode time.
    pub fn reward_per_minute(&self) -> f64 {
        per_minute(self.picked_reward, self.completion_time)
    }
}

pub(crate) fn per_minute(amount: f64, seconds: f64) -> f64 {
    if seconds > 0.0 {
        60.0 * amount / seconds
    } else {
        0.0
    }
}

/// Rewards and state changes produced by one tick.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickReport {
    pub tick: u64,
    pub reward: f64,
    pub picked: Vec<u32>,
    pub missed: Vec<u32>,
    pub done: bool,
}

/// The discrete-time world. Mutates only through [`World::step`],
/// [`World::commit_pick`] and [`World::resolve`].
#[derive(Debug, Clone)]
pub struct World {
    cfg: WorldConfig,
    belt: Belt,
    tick: u64,
    objects: Vec<WasteObject>,
    by_id: HashMap<u32, usize>,
    tasks: Vec<Option<PnPTask>>,
    cursor: usize,
    pending: Option<DecisionRequest>,
    done: bool,
    completion_time: Option<f64>,
    reward_buffer: f64,
    total_return: f64,
    picked_reward: f64,
    total_reward: f64,
    n_picked: usize,
    n_missed: usize,
    log: Option<Vec<Event>>,
    report: TickReport,
}

impl World {
    /// Validates `cfg` and places `pattern` so that its leading object sits at
    /// the belt entry (`x = 0`) with the rest of the pattern upstream.
    pub fn new(cfg: &WorldConfig, pattern: &Pattern) -> Result<Self, SimError> {
        cfg.validate()?;
        let belt = cfg.belt();
        let lead = pattern
            .objects
            .iter()
            .map(|o| o.x)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut objects = Vec::with_capacity(pattern.objects.len());
        let mut by_id = HashMap::with_capacity(pattern.objects.len());
        for o in &pattern.objects {
            if o.y.abs() > belt.half_width() + GEOM_EPS || !o.x.is_finite() {
                return Err(SimError::ObjectOffBelt { object: o.id });
            }
            let reward_r = reward_of(o.area_cm2, o.p_detection, o.p_grasp, cfg.reward_k)
                .map_err(|source| SimError::InvalidObject { object: o.id, source })?;
            if by_id.insert(o.id, objects.len()).is_some() {
                return Err(SimError::DuplicateObjectId(o.id));
            }
            let x = o.x - lead;
            objects.push(WasteObject {
                id: o.id,
                x_start: x,
                x,
                y: o.y,
                area_cm2: o.area_cm2,
                p_detection: o.p_detection,
                p_grasp: o.p_grasp,
                reward_r,
                state: ObjectState::OnBelt,
            });
        }
        let total_reward = objects.iter().map(|o| o.reward_r).sum();
        let mut world = Self {
            cfg: cfg.clone(),
            belt,
            tick: 0,
            objects,
            by_id,
            tasks: vec![None; cfg.robots.len()],
            cursor: 0,
            pending: None,
            done: false,
            completion_time: None,
            reward_buffer: 0.0,
            total_return: 0.0,
            picked_reward: 0.0,
            total_reward,
            n_picked: 0,
            n_missed: 0,
            log: Some(Vec::new()),
            report: TickReport::default(),
        };
        world.settle();
        Ok(world)
    }

    /// Turns event recording on or off (search routines run without a log).
    pub fn set_logging(&mut self, on: bool) {
        match (on, self.log.is_some()) {
            (true, false) => self.log = Some(Vec::new()),
            (false, true) => self.log = None,
            _ => {}
        }
    }

    pub fn config(&self) -> &WorldConfig {
        &self.cfg
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn sim_time(&self) -> f64 {
        self.tick as f64 / self.cfg.tick_rate
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn objects(&self) -> &[WasteObject] {
        &self.objects
    }

    pub fn object(&self, id: u32) -> Option<&WasteObject> {
        self.by_id.get(&id).map(|&i| &self.objects[i])
    }

    pub fn task(&self, robot: usize) -> Option<&PnPTask> {
        self.tasks.get(robot).and_then(|t| t.as_ref())
    }

    pub fn is_idle(&self, robot: usize) -> bool {
        matches!(self.tasks.get(robot), Some(None))
    }

    /// End-effector position of `robot` at the current time.
    pub fn ee_position(&self, robot: usize) -> Point2 {
        let spec = &self.cfg.robots[robot];
        match &self.tasks[robot] {
            Some(task) => task.ee_position(spec.rest_point, spec.ee_speed, self.cfg.grasp_dwell, self.sim_time()),
            None => spec.rest_point,
        }
    }

    pub fn log(&self) -> EventLog {
        EventLog {
            events: self.log.clone().unwrap_or_default(),
        }
    }

    pub fn into_log(self) -> EventLog {
        EventLog {
            events: self.log.unwrap_or_default(),
        }
    }

    /// Rewards emitted since the previous call.
    pub fn take_reward(&mut self) -> f64 {
        std::mem::take(&mut self.reward_buffer)
    }

    pub fn stats(&self) -> EpisodeStats {
        let completion_time = self.completion_time.unwrap_or_else(|| self.sim_time());
        let reward_weighted_rate = if self.n_missed == 0 {
            1.0
        } else if self.total_reward > 0.0 {
            self.picked_reward / self.total_reward
        } else {
            0.0
        };
        EpisodeStats {
            n_total: self.objects.len(),
            n_picked: self.n_picked,
            n_missed: self.n_missed,
            completion_time,
            picks_per_minute: per_minute(self.n_picked as f64, completion_time),
            reward_weighted_rate,
            picked_reward: self.picked_reward,
            total_return: self.total_return,
        }
    }

    /// Advances the clock by one tick and applies everything that falls due.
    pub fn step(&mut self) -> Result<TickReport, SimError> {
        if self.done {
            return Err(SimError::StepAfterDone);
        }
        self.tick += 1;
        self.report = TickReport {
            tick: self.tick,
            ..TickReport::default()
        };
        let t = self.sim_time();
        let v = self.belt.speed;
        for o in &mut self.objects {
            if o.unresolved() {
                o.x = o.x_start + v * t;
            }
        }
        self.cursor = 0;
        self.pending = None;
        self.settle();
        Ok(std::mem::take(&mut self.report))
    }

    /// Feasible candidates for an idle robot, or `None` if it is busy or
    /// nothing is reachable.
    pub fn build_decision_request(&self, robot: usize) -> Option<DecisionRequest> {
        if self.done || !self.is_idle(robot) {
            return None;
        }
        let spec = &self.cfg.robots[robot];
        let now = self.sim_time();
        let mut feasible: Vec<(f64, CandidateFeature)> = self
            .objects
            .iter()
            .filter(|o| o.state == ObjectState::OnBelt)
            .filter_map(|o| {
                let hit = intercept(spec, spec.rest_point, o.position(), now, &self.belt).ok()?;
                let t_process = super::kinematics::processing_time(spec, hit, self.cfg.grasp_dwell, self.cfg.drop_dwell);
                Some((
                    o.x,
                    CandidateFeature {
                        object_id: o.id,
                        x_rel: o.x - spec.base.x,
                        y_rel: o.y - spec.base.y,
                        t_process,
                        reward_r: o.reward_r,
                    },
                ))
            })
            .collect();
        if feasible.is_empty() {
            return None;
        }
        feasible.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.object_id.cmp(&b.1.object_id)));
        feasible.truncate(self.cfg.action_slots);
        let n = self.cfg.robots.len();
        let robots = (0..n)
            .map(|k| {
                let r = (robot + k) % n;
                match &self.tasks[r] {
                    Some(task) => RobotStatus {
                        busy: true,
                        t_available: (task.carry_end_time - now).max(0.0),
                    },
                    None => RobotStatus {
                        busy: false,
                        t_available: 0.0,
                    },
                }
            })
            .collect();
        Some(DecisionRequest {
            robot_index: robot,
            robot_base: spec.base,
            sim_time: now,
            candidates: feasible.into_iter().map(|(_, c)| c).collect(),
            robots,
        })
    }

    /// Commits `robot` to pick `object_id`, which must be one of its current
    /// candidates.
    pub fn commit_pick(&mut self, robot: usize, object_id: u32) -> Result<PnPTask, SimError> {
        if self.done {
            return Err(SimError::StepAfterDone);
        }
        if robot >= self.cfg.robots.len() {
            return Err(SimError::NoSuchRobot(robot));
        }
        if !self.is_idle(robot) {
            return Err(SimError::RobotBusy { robot });
        }
        let is_candidate = self
            .build_decision_request(robot)
            .is_some_and(|req| req.candidates.iter().any(|c| c.object_id == object_id));
        if !is_candidate {
            return Err(SimError::NotACandidate { robot, object: object_id });
        }
        let spec = &self.cfg.robots[robot];
        let idx = self.by_id[&object_id];
        let now = self.sim_time();
        let hit = intercept(spec, spec.rest_point, self.objects[idx].position(), now, &self.belt)
            .expect("candidate is feasible");
        let task = PnPTask::plan(spec, object_id, now, spec.rest_point, hit, self.cfg.grasp_dwell, self.cfg.drop_dwell);
        self.objects[idx].state = ObjectState::Targeted;
        self.tasks[robot] = Some(task);
        self.pending = None;
        self.record(EventBody::Commit {
            robot,
            object: object_id,
            intercept_x: task.intercept_point.x,
            intercept_y: task.intercept_point.y,
            intercept_time: task.intercept_time,
            carry_end_time: task.carry_end_time,
            t_process: task.t_process,
        });
        self.settle();
        Ok(task)
    }

    /// Advances until some idle robot has candidates (returned) or the
    /// episode ends (`None`). Idle robots are polled upstream first within a tick.
    pub fn next_decision(&mut self) -> Result<Option<DecisionRequest>, SimError> {
        loop {
            if self.done {
                return Ok(None);
            }
            if let Some(req) = &self.pending {
                return Ok(Some(req.clone()));
            }
            while self.cursor < self.cfg.robots.len() {
                if let Some(req) = self.build_decision_request(self.cursor) {
                    self.pending = Some(req.clone());
                    return Ok(Some(req));
                }
                self.cursor += 1;
            }
            self.step()?;
        }
    }

    /// Applies a controller's answer to the pending decision. A no-op leaves
    /// the robot idle until the next tick.
    pub fn resolve(&mut self, choice: Choice) -> Result<Option<PnPTask>, SimError> {
        let req = self.pending.take().ok_or(SimError::NoPendingDecision)?;
        let robot = req.robot_index;
        let ids: Vec<u32> = req.candidates.iter().map(|c| c.object_id).collect();
        let outcome = match choice {
            Choice::Noop => {
                self.record(EventBody::Decision {
                    robot,
                    candidates: ids,
                    slot: None,
                });
                None
            }
            Choice::Pick(slot) => {
                let Some(object) = ids.get(slot).copied() else {
                    let n_candidates = ids.len();
                    self.pending = Some(req);
                    return Err(SimError::InvalidSlot { slot, n_candidates });
                };
                self.record(EventBody::Decision {
                    robot,
                    candidates: ids,
                    slot: Some(slot),
                });
                Some(self.commit_pick(robot, object)?)
            }
        };
        self.cursor = robot + 1;
        self.pending = None;
        Ok(outcome)
    }

    fn record(&mut self, body: EventBody) {
        if let Some(log) = &mut self.log {
            log.push(Event { tick: self.tick, body });
        }
    }

    /// Completes due pick phases, frees robots, marks unrecoverable objects
    /// missed and raises done.
    fn settle(&mut self) {
        let now = self.sim_time();
        for robot in 0..self.tasks.len() {
            let Some(task) = self.tasks[robot] else { continue };
            let idx = self.by_id[&task.object_id];
            if self.objects[idx].state == ObjectState::Targeted && now + TIME_EPS >= task.intercept_time {
                let obj = &mut self.objects[idx];
                obj.state = ObjectState::Picked;
                obj.x = task.intercept_point.x;
                let reward = obj.reward_r;
                self.n_picked += 1;
                self.picked_reward += reward;
                self.emit(reward);
                self.report.picked.push(task.object_id);
                self.record(EventBody::Pick {
                    robot,
                    object: task.object_id,
                    reward,
                });
            }
            if self.objects[idx].state == ObjectState::Picked && now + TIME_EPS >= task.carry_end_time {
                self.tasks[robot] = None;
                self.record(EventBody::Idle { robot });
            }
        }

        for i in 0..self.objects.len() {
            if self.objects[i].state == ObjectState::OnBelt && !self.recoverable(&self.objects[i]) {
                self.objects[i].state = ObjectState::Missed;
                self.n_missed += 1;
                let object = self.objects[i].id;
                self.report.missed.push(object);
                self.record(EventBody::Missed { object });
            }
        }

        if !self.done && !self.objects.iter().any(WasteObject::unresolved) {
            self.done = true;
            self.report.done = true;
            self.completion_time = Some(now);
            let rate = self.stats().reward_weighted_rate;
            let terminal_reward = self.cfg.terminal_bonus + self.cfg.terminal_rate_weight * rate;
            self.emit(terminal_reward);
            self.record(EventBody::Done {
                n_picked: self.n_picked,
                n_missed: self.n_missed,
                completion_time: now,
                terminal_reward,
            });
        }
    }

    fn emit(&mut self, reward: f64) {
        self.reward_buffer += reward;
        self.total_return += reward;
        self.report.reward += reward;
    }

    /// Whether the object is on the belt and can still enter some robot's
    /// reachable disk now or later.
    fn recoverable(&self, o: &WasteObject) -> bool {
        if o.x > self.belt.length + GEOM_EPS {
            return false;
        }
        self.cfg.robots.iter().any(|r| {
            let dy = o.y - r.base.y;
            let span2 = r.reach * r.reach - dy * dy;
            span2 >= 0.0 && o.x <= r.base.x + span2.sqrt() + GEOM_EPS
        })
    }
}
