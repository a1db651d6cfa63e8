//! Data-parallel execution with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] dispatches
//! to rayon; without it every call runs sequentially. Results are always
//! returned in input order so callers stay deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Runs `n` independent seeded trials. Trial `i` draws from a ChaCha8
    /// stream seeded with `seed` and positioned on stream `i`, so the outcome
    /// does not depend on the execution mode.
    pub fn trials<R, F>(self, n: usize, seed: u64, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize, &mut ChaCha8Rng) -> R + Sync + Send,
    {
        self.map_range(n, |i| {
            let mut rng = trial_rng(seed, i);
            f(i, &mut rng)
        })
    }
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}
