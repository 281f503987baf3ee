//! Exhaustive search over pick sequences, for small instances.

use super::world::World;
use super::{Choice, SimError, WorldConfig};
use crate::patterns::Pattern;

/// Largest number of objects any sequence of pick decisions can collect.
///
/// Every decision point branches on every candidate, so any controller that
/// never idles is dominated. Exponential; meant for a handful of objects.
pub fn exhaustive_max_picked(cfg: &WorldConfig, pattern: &Pattern) -> Result<usize, SimError> {
    let mut world = World::new(cfg, pattern)?;
    world.set_logging(false);
    let mut best = 0;
    search(world, &mut best)?;
    Ok(best)
}

fn search(mut world: World, best: &mut usize) -> Result<(), SimError> {
    let Some(req) = world.next_decision()? else {
        *best = (*best).max(world.stats().n_picked);
        return Ok(());
    };
    let stats = world.stats();
    let unresolved = stats.n_total - stats.n_missed;
    if unresolved <= *best {
        return Ok(());
    }
    for slot in 0..req.candidates.len() {
        let mut branch = world.clone();
        branch.resolve(Choice::Pick(slot))?;
        search(branch, best)?;
        if *best == unresolved {
            break;
        }
    }
    Ok(())
}
