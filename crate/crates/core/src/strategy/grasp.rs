//! Greedy randomized adaptive search over strategy combinations.
//!
//! Each iteration builds a combo robot by robot, drawing every rule uniformly
//! from the `rcl_size` best rules given the upstream rules already fixed, then
//! hill-climbs over single-robot rule changes until no neighbor improves. All
//! combos are scored on one shared pattern sample.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::monte_carlo::{evaluate_on, sample_patterns, LabeledPattern, Score};
use super::{EvalReport, Rule, StrategyCombo, StrategyError};
use crate::patterns::PatternSpec;
use crate::sim::WorldConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraspParams {
    pub iterations: usize,
    pub rcl_size: usize,
    /// Patterns in the shared Monte-Carlo sample.
    pub n_samples: usize,
}

impl Default for GraspParams {
    fn default() -> Self {
        Self {
            iterations: 8,
            rcl_size: 2,
            n_samples: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRule {
    pub rule: Rule,
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEntry {
    /// Rule drawn for one robot during construction.
    Construct {
        iteration: usize,
        robot: usize,
        rcl: Vec<ScoredRule>,
        chosen: Rule,
    },
    /// Constructed solution, start of local search.
    Start {
        iteration: usize,
        combo: StrategyCombo,
        score: Score,
    },
    /// Improving neighbor accepted.
    Move {
        iteration: usize,
        combo: StrategyCombo,
        score: Score,
    },
    /// No neighbor improves.
    Converged {
        iteration: usize,
        combo: StrategyCombo,
        score: Score,
        neighbors_evaluated: usize,
    },
    /// The best combo seen so far changed.
    Incumbent {
        iteration: usize,
        combo: StrategyCombo,
        score: Score,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraspOutcome {
    pub best: StrategyCombo,
    pub report: EvalReport,
    pub trace: Vec<TraceEntry>,
}

impl GraspOutcome {
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.trace {
            out.push_str(&serde_json::to_string(entry).expect("trace serialization"));
            out.push('\n');
        }
        out
    }

    pub fn write_trace(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.trace_jsonl().as_bytes())?;
        w.flush()
    }
}

/// Samples `params.n_samples` patterns from `specs` and searches them.
pub fn grasp_search(
    specs: &[PatternSpec],
    cfg: &WorldConfig,
    params: GraspParams,
    seed: u64,
) -> Result<GraspOutcome, StrategyError> {
    let patterns = sample_patterns(specs, params.n_samples, seed)?;
    grasp_over(&patterns, cfg, params, seed)
}

/// Searches a fixed pattern set.
pub fn grasp_over(
    patterns: &[LabeledPattern],
    cfg: &WorldConfig,
    params: GraspParams,
    seed: u64,
) -> Result<GraspOutcome, StrategyError> {
    if params.iterations == 0 || params.rcl_size == 0 {
        return Err(StrategyError::InvalidParams(format!(
            "iterations and rcl_size must be >= 1 (got {} and {})",
            params.iterations, params.rcl_size
        )));
    }
    let n_robots = cfg.robots.len();
    // Decorrelate from the pattern sampling stream.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut scorer = Scorer {
        patterns,
        cfg,
        cache: BTreeMap::new(),
    };
    let mut trace = Vec::new();
    let mut incumbent: Option<(StrategyCombo, Score)> = None;

    for iteration in 0..params.iterations {
        let mut rules: Vec<Rule> = Vec::with_capacity(n_robots);
        for robot in 0..n_robots {
            let mut scored = Vec::with_capacity(Rule::ALL.len());
            for rule in Rule::ALL {
                let mut partial = rules.clone();
                partial.push(rule);
                let score = scorer.score(&StrategyCombo::new(partial))?;
                scored.push(ScoredRule { rule, score });
            }
            // Stable: equal scores keep rule order.
            scored.sort_by(|a, b| b.score.cmp(&a.score));
            scored.truncate(params.rcl_size);
            let chosen = scored[rng.gen_range(0..scored.len())].rule;
            trace.push(TraceEntry::Construct {
                iteration,
                robot,
                rcl: scored,
                chosen,
            });
            rules.push(chosen);
        }

        let mut current = StrategyCombo::new(rules);
        let mut current_score = scorer.score(&current)?;
        trace.push(TraceEntry::Start {
            iteration,
            combo: current.clone(),
            score: current_score,
        });
        let mut evaluated = 0;
        loop {
            let mut best_move: Option<(StrategyCombo, Score)> = None;
            for robot in 0..n_robots {
                for rule in Rule::ALL {
                    if rule == current.rules[robot] {
                        continue;
                    }
                    let mut neighbor = current.clone();
                    neighbor.rules[robot] = rule;
                    let score = scorer.score(&neighbor)?;
                    evaluated += 1;
                    let reference = best_move.as_ref().map_or(current_score, |(_, s)| *s);
                    if score.beats(&reference) {
                        best_move = Some((neighbor, score));
                    }
                }
            }
            match best_move {
                Some((combo, score)) => {
                    current = combo;
                    current_score = score;
                    trace.push(TraceEntry::Move {
                        iteration,
                        combo: current.clone(),
                        score,
                    });
                }
                None => break,
            }
        }
        trace.push(TraceEntry::Converged {
            iteration,
            combo: current.clone(),
            score: current_score,
            neighbors_evaluated: evaluated,
        });
        if incumbent.as_ref().is_none_or(|(_, s)| current_score.beats(s)) {
            trace.push(TraceEntry::Incumbent {
                iteration,
                combo: current.clone(),
                score: current_score,
            });
            incumbent = Some((current, current_score));
        }
    }

    let (best, _) = incumbent.expect("at least one iteration");
    let report = scorer.report(&best)?;
    Ok(GraspOutcome { best, report, trace })
}

/// Memoized evaluation; partial combos run with only the robots they cover.
struct Scorer<'a> {
    patterns: &'a [LabeledPattern],
    cfg: &'a WorldConfig,
    cache: BTreeMap<StrategyCombo, EvalReport>,
}

impl Scorer<'_> {
    fn report(&mut self, combo: &StrategyCombo) -> Result<EvalReport, StrategyError> {
        if let Some(r) = self.cache.get(combo) {
            return Ok(r.clone());
        }
        let cfg = self.cfg.truncated(combo.len());
        let report = evaluate_on(combo, self.patterns, &cfg)?;
        self.cache.insert(combo.clone(), report.clone());
        Ok(report)
    }

    fn score(&mut self, combo: &StrategyCombo) -> Result<Score, StrategyError> {
        self.report(combo).map(|r| r.score())
    }
}
