//! Seeded randomness used for world initialization.
//!
//! Every world owns one ChaCha8 stream derived from the 64-bit seed. Its
//! position is captured in [`RngState`] so a saved world can resume the exact
//! same stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub type SimRng = ChaCha8Rng;

/// Mean and standard deviation of the clamped normal trait distribution.
pub const TRAIT_MEAN: f64 = 0.5;
pub const TRAIT_STD_DEV: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
    /// Word offset into the ChaCha stream, as a decimal string so that
    /// every serde format can carry the full 128 bits.
    #[serde(with = "u128_string")]
    pub word_pos: u128,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState {
            seed,
            stream: 0,
            word_pos: 0,
        }
    }

    pub fn capture(seed: u64, rng: &SimRng) -> Self {
        RngState {
            seed,
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }

    pub fn restore(&self) -> SimRng {
        let mut rng = SimRng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}

/// Draws `clamp(N(0.5, 0.2²), 0, 1) * scale`. Consumes one normal sample.
pub fn sample_trait<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let normal = Normal::new(TRAIT_MEAN, TRAIT_STD_DEV).expect("constant parameters are valid");
    normal.sample(rng).clamp(0.0, 1.0) * scale
}

/// Uniform draw on `[0, 1)`.
pub fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

mod u128_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_scale_annihilates() {
        let mut rng = SimRng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(sample_trait(&mut rng, 0.0), 0.0);
        }
    }

    #[test]
    fn unit_scale_stays_in_bounds() {
        let mut rng = SimRng::seed_from_u64(11);
        for _ in 0..10_000 {
            let v = sample_trait(&mut rng, 1.0);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn scaled_draw_stays_below_scale() {
        let mut rng = SimRng::seed_from_u64(5);
        for _ in 0..1000 {
            let v = sample_trait(&mut rng, 3.0);
            assert!((0.0..=3.0).contains(&v));
        }
    }

    #[test]
    fn golden_first_draw_seed_42() {
        let mut rng = SimRng::seed_from_u64(42);
        let v = sample_trait(&mut rng, 1.0);
        assert_eq!(v.to_bits(), GOLDEN_SEED_42_FIRST_TRAIT.to_bits(), "got {v:?}");
    }

    const GOLDEN_SEED_42_FIRST_TRAIT: f64 = 0.5955962476702044;

    #[test]
    fn state_round_trip_resumes_stream() {
        let mut rng = SimRng::seed_from_u64(99);
        for _ in 0..17 {
            sample_trait(&mut rng, 1.0);
        }
        let state = RngState::capture(99, &rng);
        let json = serde_json::to_string(&state).unwrap();
        let back: RngState = serde_json::from_str(&json).unwrap();
        let mut resumed = back.restore();
        for _ in 0..50 {
            assert_eq!(sample_unit(&mut rng).to_bits(), sample_unit(&mut resumed).to_bits());
        }
    }
}
