//! Counter-based random streams.
//!
//! Every Monte-Carlo trial draws from its own ChaCha8 stream selected by
//! `(seed, domain, trial index)`, so results do not depend on how trials are
//! split across workers. Reductions go through [`chunked_map`], which fixes the
//! chunk boundaries and returns chunk results in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials per work unit for parallel reductions.
pub const CHUNK_TRIALS: u64 = 4096;

/// Stream-domain tags keep estimators that share a seed statistically independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    ArrayGain = 1,
    Channel = 2,
    Wishart = 3,
}

/// RNG for one trial.
pub fn trial_rng(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Applies `f` to consecutive index ranges of at most [`CHUNK_TRIALS`] and
/// returns the per-chunk outputs in order. Runs on the current rayon pool.
pub fn chunked_map<A, F>(trials: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(std::ops::Range<u64>) -> A + Sync + Send,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(trials);
            f(start..end)
        })
        .collect()
}
