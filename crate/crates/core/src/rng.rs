//! Seed plumbing. Every random draw in the crate comes from a [`ChaCha8Rng`]
//! seeded through this module, so results never depend on ambient entropy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent child seed for stream `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(mix(master) ^ mix(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Runs `f(index, seed)` for every sample on the rayon pool. Each sample
/// draws from its own derived seed and results come back in index order, so
/// the output does not depend on scheduling or worker count.
pub fn run_samples<T, F>(count: usize, master: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| f(i, derive_seed(master, i as u64)))
        .collect()
}


/// Sizes the global rayon pool used by [`run_samples`]; `0` keeps rayon's
/// default. Only the first call in a process takes effect.
pub fn configure_workers(workers: usize) -> crate::Result<()> {
    if workers == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| crate::Error::Config(format!("cannot size the worker pool: {e}")))
}
