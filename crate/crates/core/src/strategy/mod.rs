//! Dispatching rules, their Monte-Carlo evaluation and the search for robust
//! rule combinations.

mod grasp;
mod greedy;
mod monte_carlo;
mod rules;

use thiserror::Error;

pub use grasp::{grasp_over, grasp_search, GraspOutcome, GraspParams, ScoredRule, TraceEntry};
pub use greedy::{greedy_gt, GreedyOutcome, GREEDY_MAX_ROBOTS};
pub use monte_carlo::{
    evaluate_on, monte_carlo_eval, sample_patterns, EvalReport, LabeledPattern, PatternOutcome, Score,
};
pub use rules::{apply_rule, Rule, StrategyCombo};

use crate::patterns::PatternError;
use crate::sim::SimError;

/// Default set used for robust-combo search: Poisson radii and grid pitches
/// spread over `[0.15, 0.4]`.
pub fn mixed_specs(region_length: f64, belt_width: f64) -> Vec<crate::patterns::PatternSpec> {
    use crate::patterns::PatternSpec;
    let params = [0.15, 0.2, 0.25, 0.3, 0.35, 0.4];
    params
        .iter()
        .flat_map(|&p| {
            [
                PatternSpec::poisson(p, region_length, belt_width, 0),
                PatternSpec::grid(p, region_length, belt_width, 0),
            ]
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("unknown rule {0:?}")]
    UnknownRule(String),
    #[error("empty candidate list")]
    EmptyCandidates,
    #[error("combo has {got} rules but the station has {expected} robots")]
    ComboLength { expected: usize, got: usize },
    #[error("at least one pattern sample is required")]
    NoSamples,
    #[error("at least one pattern spec is required")]
    NoSpecs,
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}
