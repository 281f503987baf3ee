//! Object arrangements fed onto the belt.
//!
//! Two families are supported: Poisson-disk patterns with a minimum pairwise
//! distance and grid lattices with a fixed pitch. Pattern coordinates use the
//! belt frame orientation (`x` grows with belt motion) and are translated so
//! the smallest `x` is zero.

mod grid;
mod io;
mod poisson;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{lane_count, sample_grid};
pub use io::{load_pattern, save_pattern};
pub use poisson::{sample_poisson_disk, POISSON_ATTEMPTS};

/// Along-belt extent of generated patterns unless stated otherwise.
pub const DEFAULT_REGION_LENGTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternObject {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub area_cm2: f64,
    pub p_detection: f64,
    pub p_grasp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pattern {
    pub belt_width: f64,
    pub objects: Vec<PatternObject>,
}

impl Pattern {
    pub fn empty(belt_width: f64) -> Self {
        Self {
            belt_width,
            objects: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Checks every object against the schema domains.
    pub fn validate(&self) -> Result<(), PatternError> {
        if !(self.belt_width > 0.0 && self.belt_width.is_finite()) {
            return Err(PatternError::Schema(format!("belt_width must be > 0 (got {})", self.belt_width)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for o in &self.objects {
            let bad = |what: &str, v: f64| PatternError::Schema(format!("object {}: {what} = {v}", o.id));
            if !seen.insert(o.id) {
                return Err(PatternError::Schema(format!("duplicate object id {}", o.id)));
            }
            if !o.x.is_finite() {
                return Err(bad("x", o.x));
            }
            if !o.y.is_finite() || o.y.abs() > 0.5 * self.belt_width + 1e-9 {
                return Err(bad("y", o.y));
            }
            if !(o.area_cm2 >= 0.0 && o.area_cm2.is_finite()) {
                return Err(bad("area_cm2", o.area_cm2));
            }
            if !(0.0..=1.0).contains(&o.p_detection) {
                return Err(bad("p_detection", o.p_detection));
            }
            if !(0.0..=1.0).contains(&o.p_grasp) {
                return Err(bad("p_grasp", o.p_grasp));
            }
        }
        Ok(())
    }
}

/// Closed interval for a uniformly drawn attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.hi > self.lo {
            rng.gen_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeRanges {
    pub area_cm2: Range,
    pub p_detection: Range,
    pub p_grasp: Range,
}

impl Default for AttributeRanges {
    fn default() -> Self {
        Self {
            area_cm2: Range::new(20.0, 300.0),
            p_detection: Range::new(0.7, 1.0),
            p_grasp: Range::new(0.6, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternKind {
    PoissonDisk {
        min_radius: f64,
    },
    Grid {
        spacing: f64,
        /// Uniform positional noise amplitude; zero keeps an exact lattice.
        #[serde(default)]
        jitter: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    #[serde(flatten)]
    pub kind: PatternKind,
    pub region_length: f64,
    pub belt_width: f64,
    #[serde(default)]
    pub attributes: AttributeRanges,
    #[serde(default)]
    pub seed: u64,
}

impl PatternSpec {
    pub fn poisson(min_radius: f64, region_length: f64, belt_width: f64, seed: u64) -> Self {
        Self {
            kind: PatternKind::PoissonDisk { min_radius },
            region_length,
            belt_width,
            attributes: AttributeRanges::default(),
            seed,
        }
    }

    pub fn grid(spacing: f64, region_length: f64, belt_width: f64, seed: u64) -> Self {
        Self {
            kind: PatternKind::Grid { spacing, jitter: 0.0 },
            region_length,
            belt_width,
            attributes: AttributeRanges::default(),
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Short label such as `grid s=0.15` or `poisson r=0.2`.
    pub fn label(&self) -> String {
        match self.kind {
            PatternKind::PoissonDisk { min_radius } => format!("poisson r={min_radius}"),
            PatternKind::Grid { spacing, .. } => format!("grid s={spacing}"),
        }
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        let bad = |msg: String| Err(PatternError::InvalidSpec(msg));
        match self.kind {
            PatternKind::PoissonDisk { min_radius } if !(min_radius > 0.0 && min_radius.is_finite()) => {
                return bad(format!("min_radius must be > 0 (got {min_radius})"));
            }
            PatternKind::Grid { spacing, jitter } => {
                if !(spacing > 0.0 && spacing.is_finite()) {
                    return bad(format!("spacing must be > 0 (got {spacing})"));
                }
                if !(jitter >= 0.0 && jitter.is_finite()) {
                    return bad(format!("jitter must be >= 0 (got {jitter})"));
                }
            }
            _ => {}
        }
        if !(self.region_length > 0.0 && self.region_length.is_finite()) {
            return bad(format!("region_length must be > 0 (got {})", self.region_length));
        }
        if !(self.belt_width > 0.0 && self.belt_width.is_finite()) {
            return bad(format!("belt_width must be > 0 (got {})", self.belt_width));
        }
        let a = &self.attributes;
        let check = |name: &str, r: Range, lo: f64, hi: f64| {
            if !(r.lo <= r.hi && r.lo >= lo && r.hi <= hi) {
                Err(PatternError::InvalidSpec(format!("{name} range [{}, {}] outside [{lo}, {hi}]", r.lo, r.hi)))
            } else {
                Ok(())
            }
        };
        check("area_cm2", a.area_cm2, 0.0, f64::MAX)?;
        check("p_detection", a.p_detection, 0.0, 1.0)?;
        check("p_grasp", a.p_grasp, 0.0, 1.0)?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("invalid pattern spec: {0}")]
    InvalidSpec(String),
    #[error("pattern schema violation: {0}")]
    Schema(String),
    #[error("malformed pattern file: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Generates a pattern from either family.
pub fn generate(spec: &PatternSpec) -> Result<Pattern, PatternError> {
    match spec.kind {
        PatternKind::PoissonDisk { .. } => sample_poisson_disk(spec),
        PatternKind::Grid { .. } => sample_grid(spec),
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Orders positions by descending belt progress (then ascending `y`), assigns
/// ids in that order, shifts `min x` to zero and draws attributes.
pub(crate) fn finish(positions: Vec<(f64, f64)>, spec: &PatternSpec, rng: &mut impl Rng) -> Pattern {
    let mut positions = positions;
    positions.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    let min_x = positions.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let objects = positions
        .into_iter()
        .enumerate()
        .map(|(i, (x, y))| PatternObject {
            id: i as u32,
            x: x - min_x,
            y,
            area_cm2: spec.attributes.area_cm2.sample(rng),
            p_detection: spec.attributes.p_detection.sample(rng),
            p_grasp: spec.attributes.p_grasp.sample(rng),
        })
        .collect();
    Pattern {
        belt_width: spec.belt_width,
        objects,
    }
}
