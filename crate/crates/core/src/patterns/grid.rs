use rand::Rng;

use super::{finish, rng_for, Pattern, PatternError, PatternKind, PatternSpec};

const LATTICE_EPS: f64 = 1e-9;

/// Number of lanes a lattice of pitch `spacing` fits across `belt_width`
/// when centered on the belt axis.
pub fn lane_count(belt_width: f64, spacing: f64) -> usize {
    (belt_width / spacing + LATTICE_EPS).floor() as usize + 1
}

/// Lattice with pitch `spacing`, centered across the belt and filling
/// `[0, region_length]` along it.
pub fn sample_grid(spec: &PatternSpec) -> Result<Pattern, PatternError> {
    spec.validate()?;
    let PatternKind::Grid { spacing: s, jitter } = spec.kind else {
        return Err(PatternError::InvalidSpec("expected a grid spec".into()));
    };
    let mut rng = rng_for(spec.seed);
    let half = 0.5 * spec.belt_width;
    let lanes = lane_count(spec.belt_width, s);
    let rows = (spec.region_length / s + LATTICE_EPS).floor() as usize + 1;
    let center = 0.5 * (lanes as f64 - 1.0);
    let mut positions = Vec::with_capacity(lanes * rows);
    for i in 0..rows {
        for j in 0..lanes {
            let mut x = i as f64 * s;
            let mut y = (j as f64 - center) * s;
            if jitter > 0.0 {
                x += rng.gen_range(-jitter..=jitter);
                y = (y + rng.gen_range(-jitter..=jitter)).clamp(-half, half);
            }
            positions.push((x, y.clamp(-half, half)));
        }
    }
    Ok(finish(positions, spec, &mut rng))
}
