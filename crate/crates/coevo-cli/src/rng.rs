//! Seeded random number generation for initial conditions.
//!
//! The generator is SplitMix64 (Steele, Lea and Flood's `splittable` mixer,
//! as published in Vigna's reference C implementation): 64 bits of state
//! advanced by the golden-gamma constant and scrambled by two
//! multiply-xorshift rounds. It is chosen deliberately over heavier PRNGs:
//! the whole algorithm is four lines, has published test vectors, and can be
//! reimplemented bit-for-bit in any language, so seeds recorded in reports
//! stay portable across ports of this tool.
//!
//! Uniform conversion: a draw `u` maps to `(u >> 11) as f64 * 2^-53`, the
//! standard 53-bit mantissa fill, yielding doubles uniform on `[0, 1)`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

/// One SplitMix64 output computed from the state `x`: advance by the gamma
/// constant, then scramble. Also used as the seed-mixing primitive.
pub fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(MIX1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX2);
    z ^ (z >> 31)
}

/// The sequential generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX2);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `n` uniform doubles, drawn in index order.
    pub fn unit_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_f64()).collect()
    }
}

/// Derives the seed of one sweep cell from the base seed and the cell's
/// content. Chained SplitMix64 mixing over the IEEE-754 bit patterns:
///
/// ```text
/// cell_seed = mix(mix(mix(base ^ bits(epsilon)) ^ bits(phi)) ^ seed_entry)
/// ```
///
/// Keying on cell content rather than grid position means extending a grid
/// never changes the seeds of existing cells.
pub fn cell_seed(base: u64, epsilon: f64, phi: f64, seed_entry: u64) -> u64 {
    let h = mix(base ^ epsilon.to_bits());
    let h = mix(h ^ phi.to_bits());
    mix(h ^ seed_entry)
}
