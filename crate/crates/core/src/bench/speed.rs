use serde::{Deserialize, Serialize};

use super::{BenchError, ControllerSpec};
use crate::patterns::Pattern;
use crate::sim::WorldConfig;

/// Bracket, tolerance and number of evenly spaced probe speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedSearch {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub n_samples: usize,
}

impl Default for SpeedSearch {
    fn default() -> Self {
        Self {
            lo: 0.01,
            hi: 0.20,
            tol: 0.001,
            n_samples: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedResult {
    /// Largest speed found at which every object is picked.
    pub speed: f64,
    /// Probe speeds and whether everything was picked at each.
    pub samples: Vec<(f64, bool)>,
    pub bisection_steps: usize,
}

/// Whether `controller` picks every object of `pattern` at `speed`.
pub fn all_picked_at(
    controller: &ControllerSpec,
    pattern: &Pattern,
    cfg: &WorldConfig,
    speed: f64,
) -> Result<bool, BenchError> {
    let stats = controller.run(pattern, &cfg.clone().with_belt_speed(speed))?;
    Ok(stats.n_missed == 0)
}

/// Largest belt speed in `[lo, hi]` at which nothing is missed.
///
/// Probes `n_samples` evenly spaced speeds first and refuses to bisect unless
/// the outcomes are all-picked up to some speed and missed beyond it.
pub fn max_belt_speed(
    controller: &ControllerSpec,
    pattern: &Pattern,
    cfg: &WorldConfig,
    search: SpeedSearch,
) -> Result<SpeedResult, BenchError> {
    let SpeedSearch { lo, hi, tol, n_samples } = search;
    if !(lo > 0.0 && hi > lo && tol > 0.0 && n_samples >= 2) {
        return Err(BenchError::InvalidSearch(format!(
            "need 0 < lo < hi, tol > 0 and at least 2 samples (got {search:?})"
        )));
    }
    if pattern.is_empty() {
        return Ok(SpeedResult {
            speed: hi,
            samples: Vec::new(),
            bisection_steps: 0,
        });
    }
    let step = (hi - lo) / (n_samples - 1) as f64;
    let samples = (0..n_samples)
        .map(|k| {
            let v = if k + 1 == n_samples { hi } else { lo + step * k as f64 };
            all_picked_at(controller, pattern, cfg, v).map(|ok| (v, ok))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n_ok = samples.iter().take_while(|s| s.1).count();
    if samples[n_ok..].iter().any(|s| s.1) {
        return Err(BenchError::NonMonotone { samples });
    }
    if n_ok == 0 {
        return Err(BenchError::NoFeasibleSpeed { lo });
    }
    if n_ok == samples.len() {
        return Ok(SpeedResult {
            speed: hi,
            samples,
            bisection_steps: 0,
        });
    }
    let (mut a, mut b) = (samples[n_ok - 1].0, samples[n_ok].0);
    let mut steps = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if all_picked_at(controller, pattern, cfg, mid)? {
            a = mid;
        } else {
            b = mid;
        }
        steps += 1;
    }
    Ok(SpeedResult {
        speed: a,
        samples,
        bisection_steps: steps,
    })
}

/// How much faster `other` runs the belt than `base`, in percent.
pub fn speed_gain_percent(base: f64, other: f64) -> f64 {
    100.0 * (other / base - 1.0)
}
