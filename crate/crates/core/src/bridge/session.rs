use std::sync::Arc;

use super::obs::ObsVector;
use super::protocol::{Command, ErrorReply, PatternRef, Reply, StepInfo, StepReply, PROTOCOL_VERSION};
use super::{BridgeError, PatternCatalog};
use crate::sim::{Choice, DecisionRequest, World, WorldConfig};

/// One client's episode stream. Owns its world; nothing is shared with
/// other sessions except the read-only catalog.
#[derive(Debug)]
pub struct Session {
    cfg: WorldConfig,
    catalog: Arc<PatternCatalog>,
    world: Option<World>,
    request: Option<DecisionRequest>,
}

impl Session {
    pub fn new(cfg: WorldConfig, catalog: Arc<PatternCatalog>) -> Self {
        Self {
            cfg,
            catalog,
            world: None,
            request: None,
        }
    }

    pub fn config(&self) -> &WorldConfig {
        &self.cfg
    }

    /// Starts a new episode and runs it to the first decision point.
    pub fn reset(&mut self, pattern: &PatternRef, seed: Option<u64>) -> Result<StepReply, BridgeError> {
        let pattern = self.catalog.resolve(pattern, seed)?;
        let mut cfg = self.cfg.clone();
        if let Some(seed) = seed {
            cfg.rng_seed = seed;
        }
        let mut world = World::new(&cfg, &pattern).map_err(|e| match e {
            crate::sim::SimError::Config(_) => BridgeError::Sim(e),
            other => BridgeError::InvalidPattern(other.to_string()),
        })?;
        world.set_logging(false);
        self.world = Some(world);
        self.advance(false)
    }

    /// Applies `slot` for the deciding robot and runs to the next decision
    /// point. Slots without a candidate are a one-tick no-op.
    pub fn act(&mut self, slot: i64) -> Result<StepReply, BridgeError> {
        let world = self.world.as_mut().ok_or(BridgeError::NoEpisode)?;
        if world.is_done() {
            return Err(BridgeError::ActAfterDone);
        }
        let slots = self.cfg.action_slots;
        if slot < 0 || slot as usize >= slots {
            return Err(BridgeError::SlotOutOfRange { slot, slots });
        }
        let slot = slot as usize;
        let n_candidates = self.request.as_ref().map_or(0, |r| r.candidates.len());
        let noop = slot >= n_candidates;
        world.resolve(if noop { Choice::Noop } else { Choice::Pick(slot) })?;
        self.advance(noop)
    }

    /// Parses and executes one protocol line. The flag is true after `close`.
    pub fn handle_line(&mut self, line: &str) -> (Reply, bool) {
        let cmd = match serde_json::from_str::<Command>(line) {
            Ok(c) => c,
            Err(e) => return (error_reply(&BridgeError::Parse(e.to_string())), false),
        };
        let result = match cmd {
            Command::Reset { pattern, seed } => self.reset(&pattern, seed),
            Command::Act { slot } => self.act(slot),
            Command::Close => {
                self.world = None;
                self.request = None;
                return (
                    Reply::Closed {
                        v: PROTOCOL_VERSION,
                        closed: true,
                    },
                    true,
                );
            }
        };
        match result {
            Ok(step) => (Reply::Step(step), false),
            Err(e) => (error_reply(&e), false),
        }
    }

    fn advance(&mut self, noop: bool) -> Result<StepReply, BridgeError> {
        let world = self.world.as_mut().ok_or(BridgeError::NoEpisode)?;
        self.request = world.next_decision()?;
        let reward = world.take_reward();
        let obs = ObsVector::encode(&self.cfg, self.request.as_ref());
        let stats = world.stats();
        let done = world.is_done();
        Ok(StepReply {
            v: PROTOCOL_VERSION,
            obs: obs.flat(),
            mask: obs.mask_bits(),
            reward,
            done,
            info: StepInfo {
                sim_time: world.sim_time(),
                deciding_robot: self.request.as_ref().map(|r| r.robot_index),
                n_picked: stats.n_picked,
                n_missed: stats.n_missed,
                noop,
                candidate_ids: self
                    .request
                    .as_ref()
                    .map(|r| r.candidates.iter().map(|c| c.object_id).collect())
                    .unwrap_or_default(),
                stats: done.then_some(stats),
            },
        })
    }
}

fn error_reply(e: &BridgeError) -> Reply {
    Reply::Error(ErrorReply {
        v: PROTOCOL_VERSION,
        error: e.code().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{Pattern, PatternObject};

    fn session() -> Session {
        let cfg = WorldConfig::default().with_belt_speed(0.05);
        let catalog = Arc::new(PatternCatalog::with_presets(cfg.belt_width));
        Session::new(cfg, catalog)
    }

    fn step(reply: Reply) -> StepReply {
        match reply {
            Reply::Step(s) => s,
            other => panic!("expected a step reply, got {other:?}"),
        }
    }

    fn error_code(reply: Reply) -> String {
        match reply {
            Reply::Error(e) => e.error,
            other => panic!("expected an error reply, got {other:?}"),
        }
    }

    #[test]
    fn act_before_reset_and_after_done() {
        let mut s = session();
        assert_eq!(error_code(s.handle_line(r#"{"cmd":"act","slot":0}"#).0), "no_episode");
        let r = step(s.handle_line(r#"{"cmd":"reset","pattern":{"belt_width":0.4,"objects":[]}}"#).0);
        assert!(r.done);
        assert_eq!(r.reward, 11.0);
        assert_eq!(r.info.deciding_robot, None);
        assert_eq!(r.info.stats.as_ref().unwrap().n_total, 0);
        assert_eq!(error_code(s.handle_line(r#"{"cmd":"act","slot":0}"#).0), "act_after_done");
    }

    #[test]
    fn errors_leave_the_session_usable() {
        let mut s = session();
        assert_eq!(error_code(s.handle_line("{not json").0), "parse");
        assert_eq!(error_code(s.handle_line(r#"{"cmd":"reset","pattern":"nope"}"#).0), "unknown_pattern");
        let bad = r#"{"cmd":"reset","pattern":{"belt_width":0.4,"objects":[{"id":0,"x":0,"y":0,"area_cm2":-1,"p_detection":1,"p_grasp":1}]}}"#;
        assert_eq!(error_code(s.handle_line(bad).0), "invalid_pattern");
        let r = step(s.handle_line(r#"{"cmd":"reset","pattern":"grid-0.3","seed":1}"#).0);
        assert!(!r.done);
        assert_eq!(error_code(s.handle_line(r#"{"cmd":"act","slot":10}"#).0), "slot_out_of_range");
        assert_eq!(error_code(s.handle_line(r#"{"cmd":"act","slot":-1}"#).0), "slot_out_of_range");
        let r2 = step(s.handle_line(r#"{"cmd":"act","slot":0}"#).0);
        assert!(!r2.info.noop);
        let (closed, stop) = s.handle_line(r#"{"cmd":"close"}"#);
        assert!(stop);
        assert_eq!(closed.to_line(), r#"{"v":1,"closed":true}"#);
    }

    #[test]
    fn masked_slot_is_a_one_tick_noop() {
        let mut s = session();
        let p = Pattern {
            belt_width: 0.4,
            objects: vec![PatternObject {
                id: 0,
                x: 0.0,
                y: 0.0,
                area_cm2: 100.0,
                p_detection: 0.9,
                p_grasp: 0.8,
            }],
        };
        let r = s.reset(&PatternRef::Inline(p), None).unwrap();
        assert_eq!(r.mask.iter().filter(|&&m| m == 1).count(), 1);
        let t0 = r.info.sim_time;
        let r = s.act(3).unwrap();
        assert!(r.info.noop);
        assert_eq!(r.reward, 0.0);
        assert!((r.info.sim_time - t0 - 0.1).abs() < 1e-12);
        let r = s.act(0).unwrap();
        assert!(r.done);
        let expected = 0.72 * crate::sim::sigmoid(1.0) + 11.0;
        assert!((r.reward - expected).abs() < 1e-12);
    }
}
