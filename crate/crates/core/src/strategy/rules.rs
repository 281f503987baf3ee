use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::StrategyError;
use crate::sim::{CandidateFeature, Choice, Controller, ControllerError, DecisionRequest};

/// Single-robot dispatching rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Rule {
    /// Furthest along the belt.
    Fifo,
    /// Shortest processing time.
    Spt,
    /// Longest processing time.
    Lpt,
    /// Shortest distance to the robot base.
    Sd,
    /// Longest distance to the robot base.
    Ld,
    /// Highest object reward.
    Pp,
}

impl Rule {
    pub const ALL: [Rule; 6] = [Rule::Fifo, Rule::Spt, Rule::Lpt, Rule::Sd, Rule::Ld, Rule::Pp];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Fifo => "FIFO",
            Rule::Spt => "SPT",
            Rule::Lpt => "LPT",
            Rule::Sd => "SD",
            Rule::Ld => "LD",
            Rule::Pp => "PP",
        }
    }

    /// Scoring key and whether larger is better.
    fn key(self, base_x: f64, c: &CandidateFeature) -> (f64, bool) {
        match self {
            Rule::Fifo => (c.x_rel + base_x, true),
            Rule::Spt => (c.t_process, false),
            Rule::Lpt => (c.t_process, true),
            Rule::Sd => (c.x_rel.hypot(c.y_rel), false),
            Rule::Ld => (c.x_rel.hypot(c.y_rel), true),
            Rule::Pp => (c.reward_r, true),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| StrategyError::UnknownRule(s.to_string()))
    }
}

/// Index of the candidate `rule` selects; ties go to the lowest object id.
pub fn apply_rule(rule: Rule, request: &DecisionRequest) -> Result<usize, StrategyError> {
    let base_x = request.robot_base.x;
    let mut best: Option<(usize, f64, u32)> = None;
    for (i, c) in request.candidates.iter().enumerate() {
        let (key, maximize) = rule.key(base_x, c);
        let better = match best {
            None => true,
            Some((_, bk, bid)) => {
                let ord = if maximize { key.total_cmp(&bk) } else { bk.total_cmp(&key) };
                ord.is_gt() || (ord.is_eq() && c.object_id < bid)
            }
        };
        if better {
            best = Some((i, key, c.object_id));
        }
    }
    best.map(|(i, _, _)| i).ok_or(StrategyError::EmptyCandidates)
}

/// One rule per robot, indexed by robot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrategyCombo {
    pub rules: Vec<Rule>,
}

impl StrategyCombo {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self { rules }
    }

    pub fn uniform(rule: Rule, n: usize) -> Self {
        Self { rules: vec![rule; n] }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Every combination of `n` rules in lexicographic rule order.
    pub fn enumerate(n: usize) -> impl Iterator<Item = StrategyCombo> {
        let total = Rule::ALL.len().pow(n as u32);
        (0..total).map(move |mut k| {
            let mut rules = vec![Rule::Fifo; n];
            for slot in (0..n).rev() {
                rules[slot] = Rule::ALL[k % Rule::ALL.len()];
                k /= Rule::ALL.len();
            }
            StrategyCombo { rules }
        })
    }
}

impl fmt::Display for StrategyCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.rules.iter().map(|r| r.name()).collect();
        write!(f, "[{}]", names.join("; "))
    }
}

impl FromStr for StrategyCombo {
    type Err = StrategyError;

    /// Accepts `SPT,FIFO`, `SPT+FIFO` or `[SPT; FIFO]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let rules = inner
            .split([',', ';', '+'])
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Rule>, _>>()?;
        if rules.is_empty() {
            return Err(StrategyError::UnknownRule(s.to_string()));
        }
        Ok(Self { rules })
    }
}

impl Controller for StrategyCombo {
    fn decide(&mut self, request: &DecisionRequest) -> Result<Choice, ControllerError> {
        let rule = self.rules.get(request.robot_index).ok_or_else(|| {
            ControllerError::new(format!("no rule for robot {} in {self}", request.robot_index))
        })?;
        apply_rule(*rule, request)
            .map(Choice::Pick)
            .map_err(|e| ControllerError::new(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use proptest::prelude::*;

    fn cand(id: u32, x_rel: f64, y_rel: f64, t_process: f64, reward_r: f64) -> CandidateFeature {
        CandidateFeature {
            object_id: id,
            x_rel,
            y_rel,
            t_process,
            reward_r,
        }
    }

    fn request(candidates: Vec<CandidateFeature>) -> DecisionRequest {
        DecisionRequest {
            robot_index: 0,
            robot_base: Point2::new(1.0, -0.6),
            sim_time: 0.0,
            candidates,
            robots: vec![],
        }
    }

    /// Linear-scan oracle for argmax/argmin with lowest-id tie-break.
    fn scan(keys: &[(f64, u32)], maximize: bool) -> usize {
        let mut best = 0;
        for i in 1..keys.len() {
            let (k, id) = keys[i];
            let (bk, bid) = keys[best];
            let better = if maximize { k > bk } else { k < bk };
            if better || (k == bk && id < bid) {
                best = i;
            }
        }
        best
    }

    #[test]
    fn spt_picks_shortest() {
        let req = request(vec![
            cand(0, 0.1, 0.5, 3.1, 0.5),
            cand(1, 0.0, 0.5, 2.2, 0.5),
            cand(2, -0.1, 0.5, 4.0, 0.5),
        ]);
        assert_eq!(apply_rule(Rule::Spt, &req).unwrap(), 1);
        assert_eq!(apply_rule(Rule::Lpt, &req).unwrap(), 2);
        assert_eq!(apply_rule(Rule::Fifo, &req).unwrap(), 0);
    }

    #[test]
    fn fifo_ties_go_to_lower_id() {
        let req = request(vec![cand(5, 0.2, 0.3, 1.0, 0.5), cand(3, 0.2, 0.6, 1.0, 0.5)]);
        assert_eq!(apply_rule(Rule::Fifo, &req).unwrap(), 1);
    }

    #[test]
    fn pp_matches_scan_oracle() {
        let req = request(vec![
            cand(4, 0.0, 0.4, 1.0, 0.3),
            cand(9, 0.0, 0.5, 1.0, 0.52),
            cand(2, 0.0, 0.6, 1.0, 0.52),
        ]);
        let keys: Vec<(f64, u32)> = req.candidates.iter().map(|c| (c.reward_r, c.object_id)).collect();
        let got = apply_rule(Rule::Pp, &req).unwrap();
        assert_eq!(got, scan(&keys, true));
        assert_eq!(req.candidates[got].object_id, 2);
    }

    #[test]
    fn distance_rules() {
        let req = request(vec![cand(0, 0.3, 0.4, 1.0, 0.5), cand(1, 0.1, 0.3, 1.0, 0.5)]);
        assert_eq!(apply_rule(Rule::Sd, &req).unwrap(), 1);
        assert_eq!(apply_rule(Rule::Ld, &req).unwrap(), 0);
    }

    #[test]
    fn empty_candidates_error() {
        for rule in Rule::ALL {
            assert!(matches!(apply_rule(rule, &request(vec![])), Err(StrategyError::EmptyCandidates)));
        }
    }

    #[test]
    fn combo_parse_and_display() {
        let combo: StrategyCombo = "SPT,fifo".parse().unwrap();
        assert_eq!(combo.rules, vec![Rule::Spt, Rule::Fifo]);
        assert_eq!(combo.to_string(), "[SPT; FIFO]");
        assert_eq!("[SPT; FIFO]".parse::<StrategyCombo>().unwrap(), combo);
        assert!("SPT,XYZ".parse::<StrategyCombo>().is_err());
        assert_eq!(serde_json::to_string(&combo).unwrap(), r#"["SPT","FIFO"]"#);
    }

    #[test]
    fn enumeration_is_complete_and_ordered() {
        let all: Vec<_> = StrategyCombo::enumerate(2).collect();
        assert_eq!(all.len(), 36);
        assert_eq!(all[0].rules, vec![Rule::Fifo, Rule::Fifo]);
        assert_eq!(all[1].rules, vec![Rule::Fifo, Rule::Spt]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    fn arb_candidates() -> impl Strategy<Value = Vec<CandidateFeature>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.5f64..8.0, 0.0f64..1.0), 1..10).prop_map(|v| {
            v.into_iter()
                .enumerate()
                .map(|(i, (x, y, t, r))| cand(i as u32, x, y, t, r))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn rescaling_keys_keeps_choice(cands in arb_candidates(), k in -6i32..6) {
            let c = 2f64.powi(k);
            let req = request(cands.clone());
            let scaled = |f: &dyn Fn(&mut CandidateFeature)| {
                let mut r = req.clone();
                r.candidates.iter_mut().for_each(f);
                r
            };
            let t_scaled = scaled(&|x| x.t_process *= c);
            let d_scaled = scaled(&|x| { x.x_rel *= c; x.y_rel *= c; });
            let r_scaled = scaled(&|x| x.reward_r *= c);
            for (rule, other) in [
                (Rule::Spt, &t_scaled),
                (Rule::Lpt, &t_scaled),
                (Rule::Sd, &d_scaled),
                (Rule::Ld, &d_scaled),
                (Rule::Pp, &r_scaled),
            ] {
                prop_assert_eq!(apply_rule(rule, &req).unwrap(), apply_rule(rule, other).unwrap());
            }
        }

        #[test]
        fn rules_agree_with_scan(cands in arb_candidates()) {
            let req = request(cands);
            let spt: Vec<(f64, u32)> = req.candidates.iter().map(|c| (c.t_process, c.object_id)).collect();
            prop_assert_eq!(apply_rule(Rule::Spt, &req).unwrap(), scan(&spt, false));
            prop_assert_eq!(apply_rule(Rule::Lpt, &req).unwrap(), scan(&spt, true));
            let fifo: Vec<(f64, u32)> = req.candidates.iter().map(|c| (c.x_rel + 1.0, c.object_id)).collect();
            prop_assert_eq!(apply_rule(Rule::Fifo, &req).unwrap(), scan(&fifo, true));
        }
    }
}
