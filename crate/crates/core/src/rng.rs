//! Seeded random streams.
//!
//! Every stochastic quantity is drawn from ChaCha8 keyed by the run seed
//! (expanded through `SeedableRng::seed_from_u64`) and a per-purpose salt. The
//! entity index (question, path) selects the ChaCha stream, so each entity
//! owns an independent counter-based sequence and results do not depend on
//! the order in which entities are simulated.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Arrivals,
    Asker,
    Walk,
    Brownian,
    Sampling,
}

impl Purpose {
    fn salt(self) -> u64 {
        match self {
            Purpose::Arrivals => 0x6172_7269_7661_6c73,
            Purpose::Asker => 0x6173_6b65_7200_0000,
            Purpose::Walk => 0x7761_6c6b_0000_0000,
            Purpose::Brownian => 0x6272_6f77_6e69_616e,
            Purpose::Sampling => 0x7361_6d70_6c65_0000,
        }
    }
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ purpose.salt());
    rng.set_stream(index);
    rng
}

/// Uniform on the open interval (0, 1).
#[inline]
pub(crate) fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}
