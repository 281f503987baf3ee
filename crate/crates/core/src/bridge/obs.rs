use serde::{Deserialize, Serialize};

use crate::sim::{DecisionRequest, WorldConfig};

/// `x_rel, y_rel, t_process, reward_r`.
pub const FEATURES_PER_SLOT: usize = 4;
/// `busy, t_available`.
pub const FEATURES_PER_ROBOT: usize = 2;

/// Length of the flat observation for `cfg`, mask included.
pub fn obs_width(cfg: &WorldConfig) -> usize {
    FEATURES_PER_SLOT * cfg.action_slots + FEATURES_PER_ROBOT * cfg.robots.len() + cfg.action_slots
}

/// Fixed-width encoding of a decision request.
///
/// Layout: one block of four features per action slot in candidate order,
/// then two features per robot starting with the deciding robot, then the
/// slot mask as 0/1. Unused slots are zero with mask 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObsVector {
    pub features: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ObsVector {
    pub fn zeros(cfg: &WorldConfig) -> Self {
        Self {
            features: vec![0.0; FEATURES_PER_SLOT * cfg.action_slots + FEATURES_PER_ROBOT * cfg.robots.len()],
            mask: vec![false; cfg.action_slots],
        }
    }

    pub fn encode(cfg: &WorldConfig, request: Option<&DecisionRequest>) -> Self {
        let mut out = Self::zeros(cfg);
        let Some(req) = request else { return out };
        for (slot, c) in req.candidates.iter().take(cfg.action_slots).enumerate() {
            let at = slot * FEATURES_PER_SLOT;
            out.features[at..at + FEATURES_PER_SLOT].copy_from_slice(&[c.x_rel, c.y_rel, c.t_process, c.reward_r]);
            out.mask[slot] = true;
        }
        let base = FEATURES_PER_SLOT * cfg.action_slots;
        for (k, r) in req.robots.iter().enumerate() {
            let at = base + k * FEATURES_PER_ROBOT;
            out.features[at] = if r.busy { 1.0 } else { 0.0 };
            out.features[at + 1] = r.t_available;
        }
        out
    }

    /// Features followed by the mask as floats.
    pub fn flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.features.len() + self.mask.len());
        v.extend_from_slice(&self.features);
        v.extend(self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }));
        v
    }

    pub fn mask_bits(&self) -> Vec<u8> {
        self.mask.iter().map(|&m| m as u8).collect()
    }

    /// Features of `slot` when it holds a candidate.
    pub fn slot(&self, slot: usize) -> Option<[f64; FEATURES_PER_SLOT]> {
        if !*self.mask.get(slot)? {
            return None;
        }
        let at = slot * FEATURES_PER_SLOT;
        let mut f = [0.0; FEATURES_PER_SLOT];
        f.copy_from_slice(&self.features[at..at + FEATURES_PER_SLOT]);
        Some(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::sim::{CandidateFeature, RobotStatus};

    #[test]
    fn width_and_padding() {
        let cfg = WorldConfig::default();
        assert_eq!(obs_width(&cfg), 4 * 10 + 2 * 2 + 10);
        let req = DecisionRequest {
            robot_index: 1,
            robot_base: Point2::new(2.6, 0.3),
            sim_time: 4.2,
            candidates: vec![CandidateFeature {
                object_id: 9,
                x_rel: -0.1,
                y_rel: -0.2,
                t_process: 2.5,
                reward_r: 0.6,
            }],
            robots: vec![
                RobotStatus {
                    busy: false,
                    t_available: 0.0,
                },
                RobotStatus {
                    busy: true,
                    t_available: 1.5,
                },
            ],
        };
        let obs = ObsVector::encode(&cfg, Some(&req));
        let flat = obs.flat();
        assert_eq!(flat.len(), obs_width(&cfg));
        assert_eq!(&flat[..4], &[-0.1, -0.2, 2.5, 0.6]);
        assert!(flat[4..40].iter().all(|&v| v == 0.0));
        assert_eq!(&flat[40..44], &[0.0, 0.0, 1.0, 1.5]);
        assert_eq!(flat[44], 1.0);
        assert!(flat[45..].iter().all(|&v| v == 0.0));
        assert_eq!(obs.slot(0), Some([-0.1, -0.2, 2.5, 0.6]));
        assert_eq!(obs.slot(1), None);
        assert_eq!(obs.slot(10), None);

        let done = ObsVector::encode(&cfg, None);
        assert_eq!(done.flat(), vec![0.0; obs_width(&cfg)]);
    }
}
