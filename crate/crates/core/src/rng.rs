//! Counter-based derivation of per-trial random substreams.
//!
//! Every random draw of a trial comes from a ChaCha20 stream keyed by the
//! master seed and a purpose label, with the trial index selecting the
//! stream number. Draws for one purpose never depend on parameters that only
//! affect another purpose, so a sweep over, say, the SNR sees the same caches,
//! demands and channels at every point.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// What a substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Cache,
    Demand,
    Channel,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Cache => 0x6361_6368_6500_0001,
            Purpose::Demand => 0x6465_6d61_6e64_0002,
            Purpose::Channel => 0x6368_616e_6e65_0003,
        }
    }
}

/// Returns the random stream for `(master_seed, trial_index, purpose)`.
pub fn substream(master_seed: u64, trial_index: u64, purpose: Purpose) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&purpose.tag().to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(trial_index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = substream(7, 3, Purpose::Cache).random();
        let b: u64 = substream(7, 3, Purpose::Cache).random();
        assert_eq!(a, b);
        let c: u64 = substream(7, 4, Purpose::Cache).random();
        let d: u64 = substream(7, 3, Purpose::Demand).random();
        let e: u64 = substream(8, 3, Purpose::Cache).random();
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(a, e);
    }
}
