//! Named, seedable generators. Every stochastic routine in the crate takes
//! an explicit generator argument; there is no global RNG.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::{ChaCha12Rng, ChaCha20Rng, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RngAlgorithm {
    #[default]
    ChaCha8,
    ChaCha12,
    ChaCha20,
}

impl RngAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            RngAlgorithm::ChaCha8 => "chacha8",
            RngAlgorithm::ChaCha12 => "chacha12",
            RngAlgorithm::ChaCha20 => "chacha20",
        }
    }
}

impl fmt::Display for RngAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RngAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "chacha8" => Ok(RngAlgorithm::ChaCha8),
            "chacha12" => Ok(RngAlgorithm::ChaCha12),
            "chacha20" => Ok(RngAlgorithm::ChaCha20),
            other => Err(format!("unknown rng algorithm '{other}' (expected chacha8, chacha12 or chacha20)")),
        }
    }
}

/// A 64-bit seeded generator whose algorithm is chosen at runtime.
#[derive(Debug, Clone)]
pub enum QRng {
    ChaCha8(ChaCha8Rng),
    ChaCha12(ChaCha12Rng),
    ChaCha20(ChaCha20Rng),
}

impl QRng {
    pub fn new(algorithm: RngAlgorithm, seed: u64) -> Self {
        match algorithm {
            RngAlgorithm::ChaCha8 => QRng::ChaCha8(ChaCha8Rng::seed_from_u64(seed)),
            RngAlgorithm::ChaCha12 => QRng::ChaCha12(ChaCha12Rng::seed_from_u64(seed)),
            RngAlgorithm::ChaCha20 => QRng::ChaCha20(ChaCha20Rng::seed_from_u64(seed)),
        }
    }

    pub fn seeded(seed: u64) -> Self {
        Self::new(RngAlgorithm::default(), seed)
    }
}

impl RngCore for QRng {
    fn next_u32(&mut self) -> u32 {
        match self {
            QRng::ChaCha8(r) => r.next_u32(),
            QRng::ChaCha12(r) => r.next_u32(),
            QRng::ChaCha20(r) => r.next_u32(),
        }
    }

    fn next_u64(&mut self) -> u64 {
        match self {
            QRng::ChaCha8(r) => r.next_u64(),
            QRng::ChaCha12(r) => r.next_u64(),
            QRng::ChaCha20(r) => r.next_u64(),
        }
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        match self {
            QRng::ChaCha8(r) => r.fill_bytes(dst),
            QRng::ChaCha12(r) => r.fill_bytes(dst),
            QRng::ChaCha20(r) => r.fill_bytes(dst),
        }
    }
}
