use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::bridge::PolicyClient;
use crate::patterns::Pattern;
use crate::sim::{episode_stats, EpisodeStats, WorldConfig};
use crate::strategy::{greedy_gt, LabeledPattern, Rule, StrategyCombo};

/// A controller as named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum ControllerSpec {
    /// Fixed combo for every pattern; SPT upstream and FIFO on the last robot
    /// unless given.
    RobustGt(Option<StrategyCombo>),
    /// Best combo per pattern by full enumeration.
    GreedyGt,
    Rule(StrategyCombo),
    /// Remote policy reached through [`PolicyClient`].
    Bridge(String),
}

impl ControllerSpec {
    /// SPT on every robot except FIFO on the last.
    pub fn robust_default(n_robots: usize) -> StrategyCombo {
        let mut rules = vec![Rule::Spt; n_robots];
        if let Some(last) = rules.last_mut() {
            *last = Rule::Fifo;
        }
        StrategyCombo::new(rules)
    }

    /// Plays one episode.
    pub fn run(&self, pattern: &Pattern, cfg: &WorldConfig) -> Result<EpisodeStats, BenchError> {
        Ok(match self {
            ControllerSpec::RobustGt(combo) => {
                let mut c = combo.clone().unwrap_or_else(|| Self::robust_default(cfg.robots.len()));
                episode_stats(cfg, pattern, &mut c)?
            }
            ControllerSpec::GreedyGt => greedy_gt(pattern, cfg)?.stats,
            ControllerSpec::Rule(combo) => episode_stats(cfg, pattern, &mut combo.clone())?,
            ControllerSpec::Bridge(addr) => {
                let mut client = PolicyClient::connect(addr.as_str(), cfg)?;
                episode_stats(cfg, pattern, &mut client)?
            }
        })
    }

    /// Parses a comma-separated controller list; rule combos inside use `+`.
    pub fn parse_list(s: &str) -> Result<Vec<Self>, BenchError> {
        s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for ControllerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |c: &StrategyCombo| c.rules.iter().map(|r| r.name()).collect::<Vec<_>>().join("+");
        match self {
            ControllerSpec::RobustGt(None) => f.write_str("robust-gt"),
            ControllerSpec::RobustGt(Some(c)) => write!(f, "robust-gt:{}", join(c)),
            ControllerSpec::GreedyGt => f.write_str("greedy-gt"),
            ControllerSpec::Rule(c) => write!(f, "rule:{}", join(c)),
            ControllerSpec::Bridge(addr) => write!(f, "bridge:{addr}"),
        }
    }
}

impl FromStr for ControllerSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || BenchError::UnknownController(s.to_string());
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let combo = |t: &str| t.parse::<StrategyCombo>().map_err(|_| unknown());
        match (head, tail) {
            ("robust-gt", None) => Ok(ControllerSpec::RobustGt(None)),
            ("robust-gt", Some(t)) => Ok(ControllerSpec::RobustGt(Some(combo(t)?))),
            ("greedy-gt", None) => Ok(ControllerSpec::GreedyGt),
            ("rule", Some(t)) => Ok(ControllerSpec::Rule(combo(t)?)),
            ("bridge", Some(addr)) if !addr.is_empty() => Ok(ControllerSpec::Bridge(addr.to_string())),
            _ => Err(unknown()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub controller: String,
    pub pattern: String,
    pub picked_pct: f64,
    pub time_s: f64,
    pub picks_per_min: f64,
}

impl ComparisonRow {
    pub fn from_stats(controller: impl Into<String>, pattern: impl Into<String>, s: &EpisodeStats) -> Self {
        Self {
            controller: controller.into(),
            pattern: pattern.into(),
            picked_pct: 100.0 * s.picked_fraction(),
            time_s: s.completion_time,
            picks_per_min: s.picks_per_minute,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, controller: &str, pattern: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.controller == controller && r.pattern == pattern)
    }

    pub fn controllers(&self) -> Vec<&str> {
        unique(self.rows.iter().map(|r| r.controller.as_str()))
    }

    pub fn patterns(&self) -> Vec<&str> {
        unique(self.rows.iter().map(|r| r.pattern.as_str()))
    }

    /// Picks-per-minute gain of `other` over `base` for every pattern both ran.
    pub fn benefits(&self, base: &str, other: &str) -> Vec<(String, f64)> {
        self.patterns()
            .into_iter()
            .filter_map(|p| {
                let b = self.row(base, p)?;
                let o = self.row(other, p)?;
                Some((p.to_string(), benefit_percent(b.picks_per_min, o.picks_per_min)))
            })
            .collect()
    }

    /// Plain-text rendering, one line per row.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<24} {:<16} {:>9} {:>9} {:>11}\n",
            "controller", "pattern", "picked %", "time s", "picks/min"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<24} {:<16} {:>9.1} {:>9.1} {:>11.2}\n",
                r.controller, r.pattern, r.picked_pct, r.time_s, r.picks_per_min
            ));
        }
        out
    }
}

fn unique<'a>(it: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = Vec::new();
    for s in it {
        if !seen.contains(&s) {
            seen.push(s);
        }
    }
    seen
}

/// Relative gain of `other` over `base` in percent.
pub fn benefit_percent(base: f64, other: f64) -> f64 {
    100.0 * (other - base) / base
}

/// Runs every controller on every pattern. Rows are ordered controller by
/// controller, patterns in the given order.
pub fn compare(
    controllers: &[ControllerSpec],
    patterns: &[LabeledPattern],
    cfg: &WorldConfig,
) -> Result<ComparisonTable, BenchError> {
    if controllers.is_empty() {
        return Err(BenchError::NoControllers);
    }
    if patterns.is_empty() {
        return Err(BenchError::NoPatterns);
    }
    cfg.validate().map_err(crate::sim::SimError::from)?;
    let jobs: Vec<(&ControllerSpec, &LabeledPattern)> =
        controllers.iter().flat_map(|c| patterns.iter().map(move |p| (c, p))).collect();
    let rows = jobs
        .into_par_iter()
        .map(|(c, p)| {
            c.run(&p.pattern, cfg)
                .map(|s| ComparisonRow::from_stats(c.to_string(), p.label.clone(), &s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComparisonTable { rows })
}
