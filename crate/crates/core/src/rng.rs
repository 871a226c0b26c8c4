//! Counter-based random streams.
//!
//! Every uniform draw is a pure function of `(master seed, stream, counter)`:
//! ChaCha8 keyed by the seed, with the stream id as the ChaCha nonce and the
//! counter selecting a 64-bit word of the keystream. Spin `i` draws from
//! stream `i`, so the draw a spin receives does not depend on which worker or
//! chip performs the update, or in which order spins of a colour class run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Stream used for drawing random initial states (counter = spin index).
pub const INIT_STREAM: u64 = u64::MAX;
/// Stream used for deriving per-restart seeds (counter = restart index).
pub const SEED_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStreamSpec {
    pub seed: u64,
    pub stream: u64,
    pub counter: u64,
}

impl RngStreamSpec {
    pub fn new(seed: u64, stream: u64, counter: u64) -> Self {
        Self {
            seed,
            stream,
            counter,
        }
    }

    pub fn raw(&self) -> u64 {
        let mut rng = keyed(self.seed, self.stream);
        rng.set_word_pos(u128::from(self.counter) * 2);
        rng.next_u64()
    }

    /// The uniform in `[0, 1)` addressed by this triple.
    pub fn uniform(&self) -> f64 {
        to_unit(self.raw())
    }
}

pub fn uniform_at(seed: u64, stream: u64, counter: u64) -> f64 {
    RngStreamSpec::new(seed, stream, counter).uniform()
}

/// Seed of an independent chain (restart) derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    RngStreamSpec::new(master, SEED_STREAM, index).raw()
}

fn keyed(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// 53 high bits mapped onto `[0, 1)`.
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential cursor over one stream; the `k`-th call returns the same value
/// as `uniform_at(seed, stream, k)` but amortises keystream generation.
#[derive(Debug, Clone)]
pub struct SpinStream {
    rng: ChaCha8Rng,
    counter: u64,
}

impl SpinStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            rng: keyed(seed, stream),
            counter: 0,
        }
    }

    pub fn next_uniform(&mut self) -> f64 {
        self.counter += 1;
        to_unit(self.rng.next_u64())
    }

    /// Number of draws taken so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }
}

/// One stream per spin, keyed by global spin id.
pub fn spin_streams(seed: u64, spins: impl IntoIterator<Item = usize>) -> Vec<SpinStream> {
    spins
        .into_iter()
        .map(|i| SpinStream::new(seed, i as u64))
        .collect()
}
