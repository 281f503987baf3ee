//! Experiment harness: controller comparisons on preset pattern sets, the
//! maximum belt speed at which a controller still clears a pattern, and CSV
//! export of the results.

mod compare;
mod export;
mod speed;

use thiserror::Error;

pub use compare::{benefit_percent, compare, ComparisonRow, ComparisonTable, ControllerSpec};
pub use export::{load_csv, read_csv, write_csv, export_csv, METRICS};
pub use speed::{all_picked_at, max_belt_speed, speed_gain_percent, SpeedResult, SpeedSearch};

use crate::patterns::{generate, PatternSpec, DEFAULT_REGION_LENGTH};
use crate::sim::SimError;
use crate::strategy::{LabeledPattern, StrategyError};

/// A named pattern distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    /// Identifier usable on the command line and in the bridge catalog.
    pub slug: &'static str,
    /// Row label in result tables.
    pub label: &'static str,
    pub spec: PatternSpec,
}

/// The four benchmark distributions: grids with pitch 0.15 and 0.3 m and
/// Poisson-disk patterns with radius 0.2 and 0.3 m.
pub fn paper4(belt_width: f64) -> Vec<Preset> {
    let l = DEFAULT_REGION_LENGTH;
    vec![
        Preset {
            slug: "grid-0.15",
            label: "Grid s=0.15",
            spec: PatternSpec::grid(0.15, l, belt_width, 0),
        },
        Preset {
            slug: "grid-0.3",
            label: "Grid s=0.3",
            spec: PatternSpec::grid(0.3, l, belt_width, 0),
        },
        Preset {
            slug: "poisson-0.2",
            label: "Poisson s=0.2",
            spec: PatternSpec::poisson(0.2, l, belt_width, 0),
        },
        Preset {
            slug: "poisson-0.3",
            label: "Poisson s=0.3",
            spec: PatternSpec::poisson(0.3, l, belt_width, 0),
        },
    ]
}

/// Looks up a preset by name.
pub fn preset_patterns(name: &str, belt_width: f64) -> Option<Vec<Preset>> {
    match name {
        "paper-4" => Some(paper4(belt_width)),
        _ => paper4(belt_width).into_iter().find(|p| p.slug == name).map(|p| vec![p]),
    }
}

/// One concrete pattern per preset; preset `i` is drawn with `seed + i`.
pub fn realize(presets: &[Preset], seed: u64) -> Result<Vec<LabeledPattern>, BenchError> {
    presets
        .iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(LabeledPattern {
                label: p.label.to_string(),
                pattern: generate(&p.spec.with_seed(seed.wrapping_add(i as u64)))?,
            })
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least one controller is required")]
    NoControllers,
    #[error("at least one pattern is required")]
    NoPatterns,
    #[error("unknown controller {0:?} (expected robust-gt[:RULES], greedy-gt, rule:RULES or bridge:ADDR)")]
    UnknownController(String),
    #[error("feasibility is not monotone in belt speed: {samples:?}")]
    NonMonotone { samples: Vec<(f64, bool)> },
    #[error("objects are missed even at {lo} m/s")]
    NoFeasibleSpeed { lo: f64 },
    #[error("invalid speed search: {0}")]
    InvalidSearch(String),
    #[error("malformed results file: {0}")]
    BadCsv(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pattern(#[from] crate::patterns::PatternError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
