//! Seeded pseudo-random streams.
//!
//! Every stochastic step in the crate (weight initialization, epoch shuffles,
//! bootstrap resampling, synthetic data) draws from xoshiro256** seeded
//! through SplitMix64, so a run is fully determined by its seed.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub use rand::Rng;

/// The crate-wide generator type.
pub type Prng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> Prng {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Independent substream `index` of `seed`, stable regardless of evaluation
/// order.
pub fn substream(seed: u64, index: u64) -> Prng {
    Xoshiro256StarStar::seed_from_u64(splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal draw (Box-Muller, one value per call).
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
