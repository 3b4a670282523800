//! Execution policy and seed splitting.
//!
//! Data-parallel loops (shot chunks, tomography settings, parameter sweeps)
//! go through [`Exec`]. With the `parallel` feature disabled every policy
//! runs sequentially. Results never depend on the policy: each work item
//! draws from its own stream derived from the root seed.
//!
//! Split rule:
//! - shot chunk `k` of a sampling call seeded with `s` uses
//!   `ChaCha8Rng::seed_from_u64(s)` with `set_stream(k)`;
//! - sub-tasks (tomography settings, experiment variants) use
//!   `derive_seed(s, tag)`, a SplitMix64 finalizer over `s ^ golden * (tag + 1)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether this policy actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Map `f` over `0..n`, preserving index order in the output.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fallible variant of [`Exec::map_range`]; the first error in index
    /// order wins.
    pub fn try_map_range<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map_range(n, f).into_iter().collect()
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for sub-task `tag` of a run seeded with `root`.
pub fn derive_seed(root: u64, tag: u64) -> u64 {
    splitmix64(root ^ GOLDEN.wrapping_mul(tag.wrapping_add(1)))
}

/// RNG for shot chunk `chunk` of a sampling call seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}
