//! Seeded randomness.
//!
//! Every random choice in the crate draws from ChaCha20 (`rand_chacha`) seeded
//! through `SeedableRng::seed_from_u64`. The ChaCha stream is specified
//! independently of platform and word size, so outputs are reproducible
//! everywhere for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

pub type SeededRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Selects `count` distinct indices by systematic resampling over the
/// cumulative weights.
///
/// One pass draws a single offset `u0 ∈ [0, 1/count)` and takes the index
/// under each stratum point `u0 + j/count`. Heavy components can be hit by
/// several strata; the missing picks are then drawn by another systematic pass
/// over the components not yet chosen. Any component carrying at least
/// `1/count` of the mass is therefore always selected.
pub fn systematic_distinct(
    weights: &[f64],
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    let n = weights.len();
    if count > n {
        return Err(Error::TooManyComponents {
            requested: count,
            available: n,
        });
    }
    let mut taken = vec![false; n];
    let mut picked = Vec::with_capacity(count);
    while picked.len() < count {
        let need = count - picked.len();
        let pool: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
        let total: f64 = pool.iter().map(|&i| weights[i]).sum();
        let offset: f64 = rng.random::<f64>() / need as f64;

        let mut cursor = 0;
        let mut cdf = weights[pool[0]] / total;
        for j in 0..need {
            let u = offset + j as f64 / need as f64;
            while u >= cdf && cursor + 1 < pool.len() {
                cursor += 1;
                cdf += weights[pool[cursor]] / total;
            }
            let idx = pool[cursor];
            if !taken[idx] {
                taken[idx] = true;
                picked.push(idx);
            }
        }
    }
    Ok(picked)
}
