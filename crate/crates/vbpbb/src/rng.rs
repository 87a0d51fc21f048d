//! Deterministic random number streams.
//!
//! Every random choice in the crate flows from a single `u64` master seed.
//! Named sub-seeds are derived by hashing the master seed together with a
//! domain and label, and independent replicate streams come from the ChaCha
//! stream counter. Results are therefore reproducible bit for bit regardless
//! of thread count or evaluation order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Hashes `(master, domain, label)` into a 256-bit seed.
///
/// The three parts are separated by NUL bytes so distinct `(domain, label)`
/// pairs cannot collide by concatenation.
pub fn derive_seed(master: u64, domain: &str, label: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(domain.as_bytes());
    hasher.update([0u8]);
    hasher.update(label.as_bytes());
    hasher.finalize().into()
}

/// A generator for the given sub-seed, positioned at stream 0.
pub fn seeded_rng(master: u64, domain: &str, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(master, domain, label))
}

/// An independent stream of the seed identified by `(master, domain, label)`.
///
/// Streams with different indices never overlap, which makes them safe to
/// hand out to parallel workers (one per bootstrap replicate, for example).
pub fn stream_rng(seed: [u8; 32], stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(stream);
    rng
}
