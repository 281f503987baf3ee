use rayon::prelude::*;

use super::grasp::{grasp_over, GraspParams};
use super::monte_carlo::LabeledPattern;
use super::{StrategyCombo, StrategyError};
use crate::patterns::Pattern;
use crate::sim::{episode_stats, EpisodeStats, WorldConfig};

/// Beyond this many robots the full enumeration is replaced by a search.
pub const GREEDY_MAX_ROBOTS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub combo: StrategyCombo,
    pub stats: EpisodeStats,
    /// Every combo tried, in enumeration order.
    pub evaluations: Vec<(StrategyCombo, EpisodeStats)>,
}

/// Best combo for one concrete pattern: highest picks per minute, then lower
/// completion time, then lexicographic rule order.
pub fn greedy_gt(pattern: &Pattern, cfg: &WorldConfig) -> Result<GreedyOutcome, StrategyError> {
    let n = cfg.robots.len();
    if n > GREEDY_MAX_ROBOTS {
        let single = [LabeledPattern {
            label: "pattern".into(),
            pattern: pattern.clone(),
        }];
        let outcome = grasp_over(&single, cfg, GraspParams::default(), cfg.rng_seed)?;
        let stats = outcome.report.per_pattern[0].stats.clone();
        return Ok(GreedyOutcome {
            combo: outcome.best.clone(),
            stats: stats.clone(),
            evaluations: vec![(outcome.best, stats)],
        });
    }
    let combos: Vec<StrategyCombo> = StrategyCombo::enumerate(n).collect();
    let evaluations = combos
        .into_par_iter()
        .map(|combo| {
            let mut controller = combo.clone();
            episode_stats(cfg, pattern, &mut controller).map(|s| (combo, s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = 0;
    for (i, (_, s)) in evaluations.iter().enumerate().skip(1) {
        let b = &evaluations[best].1;
        let better = s
            .picks_per_minute
            .total_cmp(&b.picks_per_minute)
            .then(b.completion_time.total_cmp(&s.completion_time))
            .is_gt();
        if better {
            best = i;
        }
    }
    let (combo, stats) = evaluations[best].clone();
    Ok(GreedyOutcome {
        combo,
        stats,
        evaluations,
    })
}
