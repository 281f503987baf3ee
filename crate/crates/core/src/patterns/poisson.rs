use rand::Rng;

use super::{finish, rng_for, Pattern, PatternError, PatternKind, PatternSpec};

/// Candidate draws around each active sample before it is retired.
pub const POISSON_ATTEMPTS: usize = 30;

/// Maximal Poisson-disk sample of the region `[0, region_length] x
/// [-belt_width/2, belt_width/2]` using dart throwing over a background grid.
pub fn sample_poisson_disk(spec: &PatternSpec) -> Result<Pattern, PatternError> {
    spec.validate()?;
    let PatternKind::PoissonDisk { min_radius: r } = spec.kind else {
        return Err(PatternError::InvalidSpec("expected a poisson_disk spec".into()));
    };
    let mut rng = rng_for(spec.seed);
    let (w, h) = (spec.region_length, spec.belt_width);
    let y0 = -0.5 * h;
    let cell = r / std::f64::consts::SQRT_2;
    let cols = ((w / cell).ceil() as usize).max(1);
    let rows = ((h / cell).ceil() as usize).max(1);
    let mut grid: Vec<Option<usize>> = vec![None; cols * rows];
    let cell_of = |x: f64, y: f64| {
        let c = ((x / cell) as usize).min(cols - 1);
        let rr = (((y - y0) / cell) as usize).min(rows - 1);
        (c, rr)
    };

    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let first = (rng.gen_range(0.0..=w), rng.gen_range(y0..=y0 + h));
    let (c, rr) = cell_of(first.0, first.1);
    grid[rr * cols + c] = Some(0);
    points.push(first);
    active.push(0);

    let r2 = r * r;
    while !active.is_empty() {
        let slot = rng.gen_range(0..active.len());
        let (px, py) = points[active[slot]];
        let mut placed = false;
        for _ in 0..POISSON_ATTEMPTS {
            // Uniform by area over the annulus [r, 2r].
            let rad = rng.gen_range(r2..4.0 * r2).sqrt();
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            let (qx, qy) = (px + rad * ang.cos(), py + rad * ang.sin());
            if !(0.0..=w).contains(&qx) || !(y0..=y0 + h).contains(&qy) {
                continue;
            }
            let (qc, qr) = cell_of(qx, qy);
            let clear = (qr.saturating_sub(2)..=(qr + 2).min(rows - 1)).all(|gy| {
                (qc.saturating_sub(2)..=(qc + 2).min(cols - 1)).all(|gx| match grid[gy * cols + gx] {
                    Some(k) => {
                        let (ox, oy) = points[k];
                        (ox - qx).powi(2) + (oy - qy).powi(2) >= r2
                    }
                    None => true,
                })
            });
            if clear {
                grid[qr * cols + qc] = Some(points.len());
                active.push(points.len());
                points.push((qx, qy));
                placed = true;
                break;
            }
        }
        if !placed {
            active.swap_remove(slot);
        }
    }
    Ok(finish(points, spec, &mut rng))
}
