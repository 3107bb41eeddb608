//! Splittable deterministic random streams.
//!
//! Every sampling operation in the library takes an [`RngStream`]
//! explicitly. A stream is identified by a 256-bit key; child streams are
//! derived by hashing the parent key with a label (and optional index), NOT
//! from the parent's consumption state. Two consequences:
//!
//! * the same master seed always produces the same output, regardless of
//!   how work is divided between threads, and
//! * children with distinct labels/indices are independent streams; reusing
//!   a label reproduces the same child.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RngStream {
    key: [u8; 32],
    rng: ChaCha12Rng,
}

impl RngStream {
    /// Root stream for a 64-bit master seed.
    pub fn from_seed(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"trawlkit/root");
        h.update(seed.to_le_bytes());
        Self::from_key(h.finalize().into())
    }

    fn from_key(key: [u8; 32]) -> Self {
        RngStream {
            key,
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    /// Child stream derived from this stream's key and a label.
    pub fn child(&self, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update([0x01]);
        h.update(label.as_bytes());
        Self::from_key(h.finalize().into())
    }

    /// Indexed child, for per-item streams inside loops.
    pub fn child_idx(&self, label: &str, idx: u64) -> Self {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update([0x02]);
        h.update(label.as_bytes());
        h.update(idx.to_le_bytes());
        Self::from_key(h.finalize().into())
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}
