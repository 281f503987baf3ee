use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{StrategyCombo, StrategyError};
use crate::patterns::{generate, Pattern, PatternSpec};
use crate::sim::{episode_stats, EpisodeStats, WorldConfig};

/// A concrete pattern with the label of the spec it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPattern {
    pub label: String,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternOutcome {
    pub label: String,
    pub stats: EpisodeStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub combo: StrategyCombo,
    pub mean_picked_fraction: f64,
    pub mean_picks_per_minute: f64,
    pub mean_reward_weighted_rate: f64,
    /// Mean picked reward per minute; the search objective.
    pub mean_reward_per_minute: f64,
    pub per_pattern: Vec<PatternOutcome>,
}

impl EvalReport {
    pub fn score(&self) -> Score {
        Score {
            objective: self.mean_reward_per_minute,
            picked_fraction: self.mean_picked_fraction,
        }
    }
}

/// Search objective: reward-weighted picks per minute, then picked fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub objective: f64,
    pub picked_fraction: f64,
}

impl Score {
    pub fn cmp(&self, other: &Score) -> Ordering {
        self.objective
            .total_cmp(&other.objective)
            .then(self.picked_fraction.total_cmp(&other.picked_fraction))
    }

    pub fn beats(&self, other: &Score) -> bool {
        self.cmp(other).is_gt()
    }
}

/// Draws `n_samples` patterns, cycling through `specs` so each spec gets an
/// equal share. Per-sample seeds come from one stream seeded by `seed`.
pub fn sample_patterns(specs: &[PatternSpec], n_samples: usize, seed: u64) -> Result<Vec<LabeledPattern>, StrategyError> {
    if specs.is_empty() {
        return Err(StrategyError::NoSpecs);
    }
    if n_samples == 0 {
        return Err(StrategyError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_samples)
        .map(|k| {
            let spec = specs[k % specs.len()].with_seed(rng.gen());
            Ok(LabeledPattern {
                label: spec.label(),
                pattern: generate(&spec)?,
            })
        })
        .collect()
}

/// Runs `combo` on every pattern (in parallel) and averages the metrics.
pub fn evaluate_on(combo: &StrategyCombo, patterns: &[LabeledPattern], cfg: &WorldConfig) -> Result<EvalReport, StrategyError> {
    if combo.len() != cfg.robots.len() {
        return Err(StrategyError::ComboLength {
            expected: cfg.robots.len(),
            got: combo.len(),
        });
    }
    if patterns.is_empty() {
        return Err(StrategyError::NoSamples);
    }
    let per_pattern = patterns
        .par_iter()
        .map(|lp| {
            let mut controller = combo.clone();
            episode_stats(cfg, &lp.pattern, &mut controller).map(|stats| PatternOutcome {
                label: lp.label.clone(),
                stats,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = per_pattern.len() as f64;
    let mean = |f: fn(&EpisodeStats) -> f64| per_pattern.iter().map(|o| f(&o.stats)).sum::<f64>() / n;
    Ok(EvalReport {
        combo: combo.clone(),
        mean_picked_fraction: mean(EpisodeStats::picked_fraction),
        mean_picks_per_minute: mean(|s| s.picks_per_minute),
        mean_reward_weighted_rate: mean(|s| s.reward_weighted_rate),
        mean_reward_per_minute: mean(EpisodeStats::reward_per_minute),
        per_pattern,
    })
}

/// Monte-Carlo estimate of a combo's performance over a pattern distribution.
pub fn monte_carlo_eval(
    combo: &StrategyCombo,
    specs: &[PatternSpec],
    n_samples: usize,
    cfg: &WorldConfig,
    seed: u64,
) -> Result<EvalReport, StrategyError> {
    let patterns = sample_patterns(specs, n_samples, seed)?;
    evaluate_on(combo, &patterns, cfg)
}
