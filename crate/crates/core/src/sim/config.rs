use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;

/// One pick-and-place robot. The rest point doubles as the drop-off bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub index: usize,
    pub base: Point2,
    pub reach: f64,
    pub ee_speed: f64,
    pub rest_point: Point2,
}

impl RobotSpec {
    pub fn within_reach(&self, p: Point2) -> bool {
        self.base.distance(p) <= self.reach + GEOM_EPS
    }
}

/// Slack applied to boundary comparisons (reach, strip edges), in meters.
pub(crate) const GEOM_EPS: f64 = 1e-9;

/// Belt geometry and motion, derived from a [`WorldConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Belt {
    pub length: f64,
    pub width: f64,
    pub speed: f64,
}

impl Belt {
    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    /// True when `p` lies on the belt surface, entry and exit included.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= -GEOM_EPS
            && p.x <= self.length + GEOM_EPS
            && p.y.abs() <= self.half_width() + GEOM_EPS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    pub belt_length: f64,
    pub belt_width: f64,
    pub belt_speed: f64,
    pub tick_rate: f64,
    pub robots: Vec<RobotSpec>,
    pub action_slots: usize,
    pub grasp_dwell: f64,
    pub drop_dwell: f64,
    pub terminal_bonus: f64,
    pub terminal_rate_weight: f64,
    /// Sigmoid gain applied to object area (cm²) in the object reward.
    pub reward_k: f64,
    pub rng_seed: u64,
}

pub const DEFAULT_BELT_WIDTH: f64 = 0.4;
pub const DEFAULT_STANDOFF: f64 = 0.1;
pub const DEFAULT_REACH: f64 = 0.8;
pub const DEFAULT_EE_SPEED: f64 = 0.5;
pub const DEFAULT_BELT_SPEED: f64 = 0.078;
/// Along-belt distance between consecutive robot bases.
pub const DEFAULT_ROBOT_PITCH: f64 = 1.6;
/// Along-belt position of the first robot base.
pub const DEFAULT_FIRST_ROBOT_X: f64 = 1.0;

impl Default for WorldConfig {
    fn default() -> Self {
        Self::with_robots(2)
    }
}

impl WorldConfig {
    /// Default station with `n` identical robots lined up on alternating
    /// sides, the first one on the `-y` side. The belt ends where the last
    /// robot's reach ends.
    pub fn with_robots(n: usize) -> Self {
        let side_y = 0.5 * DEFAULT_BELT_WIDTH + DEFAULT_STANDOFF;
        let robots: Vec<RobotSpec> = (0..n)
            .map(|i| {
                let y = if i % 2 == 0 { -side_y } else { side_y };
                let base = Point2::new(DEFAULT_FIRST_ROBOT_X + i as f64 * DEFAULT_ROBOT_PITCH, y);
                RobotSpec {
                    index: i,
                    base,
                    reach: DEFAULT_REACH,
                    ee_speed: DEFAULT_EE_SPEED,
                    rest_point: base,
                }
            })
            .collect();
        let belt_length = robots
            .last()
            .map(|r| r.base.x + r.reach)
            .unwrap_or(DEFAULT_FIRST_ROBOT_X);
        Self {
            belt_length,
            belt_width: DEFAULT_BELT_WIDTH,
            belt_speed: DEFAULT_BELT_SPEED,
            tick_rate: 10.0,
            robots,
            action_slots: 10,
            grasp_dwell: 0.5,
            drop_dwell: 0.5,
            terminal_bonus: 1.0,
            terminal_rate_weight: 10.0,
            reward_k: 0.01,
            rng_seed: 0,
        }
    }

    pub fn with_belt_speed(mut self, speed: f64) -> Self {
        self.belt_speed = speed;
        self
    }

    pub fn belt(&self) -> Belt {
        Belt {
            length: self.belt_length,
            width: self.belt_width,
            speed: self.belt_speed,
        }
    }

    pub fn tick_duration(&self) -> f64 {
        1.0 / self.tick_rate
    }

    /// Copy of this config keeping only the first `n` robots.
    pub fn truncated(&self, n: usize) -> Self {
        let mut cfg = self.clone();
        cfg.robots.truncate(n);
        cfg
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let violations = collect_violations(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }
}

/// Returns the config unchanged if every invariant holds, otherwise every
/// violated invariant.
pub fn validate_config(cfg: WorldConfig) -> Result<WorldConfig, ConfigError> {
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigViolation {
    NonPositive { field: &'static str, value: f64 },
    NegativeDwell { field: &'static str, value: f64 },
    NoActionSlots,
    NoRobots,
    RobotIndexMismatch { position: usize, index: usize },
    NonPositiveReach { robot: usize },
    EeSlowerThanBelt { robot: usize, ee_speed: f64, belt_speed: f64 },
    RestOutOfReach { robot: usize },
    RobotOnBelt { robot: usize },
    NotOrderedAlongBelt { first: usize, second: usize },
    NonAlternatingSides { first: usize, second: usize },
    OverlappingWorkspaces { first: usize, second: usize },
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ConfigViolation::*;
        match self {
            NonPositive { field, value } => write!(f, "{field} must be > 0 (got {value})"),
            NegativeDwell { field, value } => write!(f, "{field} must be >= 0 (got {value})"),
            NoActionSlots => write!(f, "action_slots must be >= 1"),
            NoRobots => write!(f, "at least one robot is required"),
            RobotIndexMismatch { position, index } => {
                write!(f, "robot at position {position} carries index {index}")
            }
            NonPositiveReach { robot } => write!(f, "robot {robot}: reach must be > 0"),
            EeSlowerThanBelt { robot, ee_speed, belt_speed } => write!(
                f,
                "ee-slower-than-belt: robot {robot} end-effector speed {ee_speed} <= belt speed {belt_speed}"
            ),
            RestOutOfReach { robot } => write!(f, "robot {robot}: rest point outside reach"),
            RobotOnBelt { robot } => write!(f, "robot {robot}: base lies on the belt strip"),
            NotOrderedAlongBelt { first, second } => {
                write!(f, "robots {first} and {second} are not ordered by increasing x")
            }
            NonAlternatingSides { first, second } => {
                write!(f, "non-alternating-sides: robots {first} and {second} are on the same side")
            }
            OverlappingWorkspaces { first, second } => write!(
                f,
                "overlapping-workspaces: robots {first} and {second} share reachable belt area"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid world config: {}", join(.violations))]
pub struct ConfigError {
    pub violations: Vec<ConfigViolation>,
}

fn join(v: &[ConfigViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

fn collect_violations(cfg: &WorldConfig) -> Vec<ConfigViolation> {
    use ConfigViolation::*;
    let mut out = Vec::new();
    for (field, value) in [
        ("belt_length", cfg.belt_length),
        ("belt_width", cfg.belt_width),
        ("belt_speed", cfg.belt_speed),
        ("tick_rate", cfg.tick_rate),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            out.push(NonPositive { field, value });
        }
    }
    for (field, value) in [("grasp_dwell", cfg.grasp_dwell), ("drop_dwell", cfg.drop_dwell)] {
        if !(value >= 0.0 && value.is_finite()) {
            out.push(NegativeDwell { field, value });
        }
    }
    if cfg.action_slots == 0 {
        out.push(NoActionSlots);
    }
    if cfg.robots.is_empty() {
        out.push(NoRobots);
    }

    let half = 0.5 * cfg.belt_width;
    for (pos, r) in cfg.robots.iter().enumerate() {
        if r.index != pos {
            out.push(RobotIndexMismatch { position: pos, index: r.index });
        }
        if !(r.reach > 0.0) {
            out.push(NonPositiveReach { robot: pos });
        }
        if !(r.ee_speed > cfg.belt_speed) {
            out.push(EeSlowerThanBelt {
                robot: pos,
                ee_speed: r.ee_speed,
                belt_speed: cfg.belt_speed,
            });
        }
        if r.base.distance(r.rest_point) > r.reach + GEOM_EPS {
            out.push(RestOutOfReach { robot: pos });
        }
        if r.base.y.abs() <= half {
            out.push(RobotOnBelt { robot: pos });
        }
    }

    for (i, pair) in cfg.robots.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if !(b.base.x > a.base.x) {
            out.push(NotOrderedAlongBelt { first: i, second: i + 1 });
        }
        if a.base.y.signum() == b.base.y.signum() {
            out.push(NonAlternatingSides { first: i, second: i + 1 });
        }
    }

    for i in 0..cfg.robots.len() {
        for j in i + 1..cfg.robots.len() {
            let (a, b) = (&cfg.robots[i], &cfg.robots[j]);
            if a.reach > 0.0 && b.reach > 0.0 && disks_meet_in_strip(a.base, a.reach, b.base, b.reach, half) {
                out.push(OverlappingWorkspaces { first: i, second: j });
            }
        }
    }
    out
}

/// Whether the intersection of two disks contains a point with `|y| <= half_width`.
///
/// The lens is convex, so its projection on `y` is an interval whose ends are
/// attained at a disk's top/bottom point lying inside the other disk or at a
/// circle-circle intersection point.
pub(crate) fn disks_meet_in_strip(c1: Point2, r1: f64, c2: Point2, r2: f64, half_width: f64) -> bool {
    let d = c1.distance(c2);
    if d >= r1 + r2 {
        return false;
    }
    let inside = |p: Point2, c: Point2, r: f64| p.distance(c) <= r + GEOM_EPS;
    let mut ys: Vec<f64> = Vec::with_capacity(6);
    for (c, r, oc, or) in [(c1, r1, c2, r2), (c2, r2, c1, r1)] {
        for p in [Point2::new(c.x, c.y + r), Point2::new(c.x, c.y - r)] {
            if inside(p, oc, or) {
                ys.push(p.y);
            }
        }
    }
    if d > (r1 - r2).abs() && d > 0.0 {
        // Circle-circle intersection points.
        let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
        let h = (r1 * r1 - a * a).max(0.0).sqrt();
        let u = (c2 - c1) * (1.0 / d);
        let mid = c1 + u * a;
        ys.push(mid.y + h * u.x);
        ys.push(mid.y - h * u.x);
    }
    if ys.is_empty() {
        return false;
    }
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo <= half_width && hi >= -half_width
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_robots(b0: Point2, b1: Point2) -> WorldConfig {
        let mut cfg = WorldConfig::with_robots(2);
        cfg.robots[0].base = b0;
        cfg.robots[0].rest_point = b0;
        cfg.robots[1].base = b1;
        cfg.robots[1].rest_point = b1;
        cfg.belt_length = 4.0;
        cfg
    }

    #[test]
    fn default_config_is_valid() {
        WorldConfig::default().validate().unwrap();
        for n in 1..=6 {
            WorldConfig::with_robots(n).validate().unwrap();
        }
    }

    #[test]
    fn far_apart_workspaces_are_valid() {
        let cfg = two_robots(Point2::new(0.5, -0.6), Point2::new(2.5, 0.6));
        assert!(validate_config(cfg).is_ok());
    }

    #[test]
    fn close_workspaces_overlap() {
        // centers 1.30 apart, reaches sum to 1.6
        let cfg = two_robots(Point2::new(0.5, -0.6), Point2::new(1.0, 0.6));
        let err = cfg.validate().unwrap_err();
        assert_eq!(
            err.violations,
            vec![ConfigViolation::OverlappingWorkspaces { first: 0, second: 1 }]
        );
        assert!(err.to_string().contains("overlapping-workspaces"));
    }

    #[test]
    fn lens_outside_strip_is_not_an_overlap() {
        // Same side, disks intersect only well away from the belt.
        let half = 0.3;
        assert!(!disks_meet_in_strip(Point2::new(0.0, -2.0), 1.0, Point2::new(1.5, -2.0), 1.0, half));
        assert!(disks_meet_in_strip(Point2::new(0.0, -0.6), 0.8, Point2::new(1.0, -0.6), 0.8, half));
        // One disk inside the other.
        assert!(disks_meet_in_strip(Point2::new(0.0, -0.6), 0.8, Point2::new(0.1, -0.6), 0.4, half));
        assert!(!disks_meet_in_strip(Point2::new(0.0, -0.6), 0.8, Point2::new(0.1, -0.6), 0.2, half));
    }

    #[test]
    fn ee_slower_than_belt_is_reported() {
        let mut cfg = WorldConfig::default();
        cfg.belt_speed = 0.05;
        for r in &mut cfg.robots {
            r.ee_speed = 0.04;
        }
        let err = cfg.validate().unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, ConfigViolation::EeSlowerThanBelt { robot: 0, .. })));
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, ConfigViolation::EeSlowerThanBelt { robot: 1, .. })));
    }

    #[test]
    fn same_side_robots_are_rejected() {
        let cfg = two_robots(Point2::new(0.5, -0.6), Point2::new(2.5, -0.6));
        let err = cfg.validate().unwrap_err();
        assert_eq!(
            err.violations,
            vec![ConfigViolation::NonAlternatingSides { first: 0, second: 1 }]
        );
    }

    #[test]
    fn all_violations_are_reported_together() {
        let mut cfg = two_robots(Point2::new(2.5, -0.6), Point2::new(0.5, -0.6));
        cfg.belt_speed = -1.0;
        cfg.grasp_dwell = -0.1;
        cfg.action_slots = 0;
        let err = cfg.validate().unwrap_err();
        assert!(err.violations.len() >= 5, "{err}");
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = WorldConfig::with_robots(3);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: WorldConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }
}
