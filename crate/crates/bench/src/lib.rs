//! Shared fixtures for the criterion benchmarks.

use beltsort::bench::{paper4, realize};
use beltsort::{Pattern, WorldConfig};

/// Default two-robot station at `belt_speed` with the benchmark patterns
/// drawn from `seed`, labelled by preset.
pub fn preset_fixtures(belt_speed: f64, seed: u64) -> (WorldConfig, Vec<(String, Pattern)>) {
    let cfg = WorldConfig::default().with_belt_speed(belt_speed);
    let patterns = realize(&paper4(cfg.belt_width), seed)
        .expect("preset patterns generate")
        .into_iter()
        .map(|lp| (lp.label, lp.pattern))
        .collect();
    (cfg, patterns)
}
