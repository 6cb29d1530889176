//! Seeded random streams.
//!
//! Every random draw in the crate goes through an [`RngStream`]: a ChaCha8
//! generator keyed by a master seed and selected by a 64-bit stream id. Two
//! streams with different ids are independent; the same `(seed, id)` pair
//! reproduces the same output on every platform.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// High bits of a stream id select the role, low bits the replicate.
const ROLE_SHIFT: u32 = 48;

/// What a stream is used for. The role is folded into the stream id so the
/// streams of different roles never collide for the same replicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamRole {
    /// Hard-constraint (configuration model) samples. Replicate `i` uses id `i`.
    Microcanonical,
    /// Soft-constraint (Chung-Lu) samples.
    Canonical,
    /// Unconditioned matchings used by moment checks.
    Matching,
    /// Degree-sequence generation.
    Family,
    /// Start vectors for iterative eigensolvers.
    Solver,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Microcanonical => 0,
            StreamRole::Canonical => 1,
            StreamRole::Matching => 2,
            StreamRole::Family => 0xfa,
            StreamRole::Solver => 0x5e,
        }
    }

    pub fn stream_id(self, index: u64) -> u64 {
        debug_assert!(index < (1 << ROLE_SHIFT));
        (self.tag() << ROLE_SHIFT) | index
    }
}

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn for_role(master_seed: u64, role: StreamRole, index: u64) -> Self {
        Self::new(master_seed, role.stream_id(index))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform integer in `0..bound` (`bound > 0`).
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        use rand::Rng;
        self.rng.random_range(0..bound)
    }

    /// Uniform double in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        use rand::Rng;
        self.rng.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
