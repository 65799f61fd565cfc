//! Seedable randomness with a portable, bit-exact contract.
//!
//! The generator is xoshiro256++ (Blackman & Vigna), state-seeded with four
//! consecutive outputs of a SplitMix64 stream over the user seed. Both
//! algorithms are fixed published constants, so equal seeds produce
//! identical draw sequences on every platform and in every build of this
//! crate. Platform-default generators are deliberately not used.
//!
//! Batch generation derives one child stream per row: row `r` of a run with
//! seed `s` uses `RandomStream::child(&parent, r)`, whose seed is the
//! `(r + 1)`-th output of a SplitMix64 stream over `s`. Rows are therefore
//! reproducible independently of generation order, which is what allows
//! parallel batch generation to be byte-identical to sequential.

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(SPLITMIX_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded xoshiro256++ stream of uniform and Bernoulli draws.
///
/// Single-owner: the stream is advanced in place and is not meant to be
/// shared across concurrent contexts. Use [`RandomStream::child`] to derive
/// independent per-row streams instead.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    s: [u64; 4],
    draws: u64,
}

impl RandomStream {
    /// Creates a stream from a 64-bit seed.
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        RandomStream { seed, s, draws: 0 }
    }

    /// The seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of uniform draws consumed so far.
    pub fn draw_count(&self) -> u64 {
        self.draws
    }

    /// Derives the independent child stream for row `row`.
    ///
    /// The child's seed is the `(row + 1)`-th SplitMix64 output over the
    /// parent's seed; it depends only on `(seed, row)`, never on how far the
    /// parent has been advanced.
    pub fn child(&self, row: u64) -> RandomStream {
        // SplitMix64 state after k steps is seed + k*gamma, so the k-th
        // output is available in O(1).
        let mut state = self.seed.wrapping_add(SPLITMIX_GAMMA.wrapping_mul(row));
        RandomStream::new(splitmix64(&mut state))
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// One uniform draw in `[0, 1)`, built from the top 53 bits of one
    /// 64-bit output.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Bernoulli draw: 1 with probability `q`, consuming exactly one
    /// uniform draw. `bernoulli(0.0)` is always 0 and `bernoulli(1.0)` is
    /// always 1, since the uniform lies in `[0, 1)`.
    #[inline]
    pub fn bernoulli(&mut self, q: f64) -> u8 {
        u8::from(self.uniform() < q)
    }
}

/// Creates a deterministic stream from a 64-bit seed; equal seeds produce
/// equal draw sequences.
pub fn new_stream(seed: u64) -> RandomStream {
    RandomStream::new(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn splitmix_reference_vector() {
        // Published first outputs for seed 0.
        let mut st = 0u64;
        assert_eq!(splitmix64(&mut st), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(&mut st), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn xoshiro_reference_vector() {
        // First outputs from the raw state {1,2,3,4}, checked against the
        // reference algorithm definition.
        let mut s = RandomStream {
            seed: 0,
            s: [1, 2, 3, 4],
            draws: 0,
        };
        assert_eq!(s.next_u64(), 0x0280_0001);
        assert_eq!(s.next_u64(), 0x0380_0067);
        assert_eq!(s.next_u64(), 0x000C_C000_0380_0067);
    }

    #[test]
    fn seeded_outputs_are_frozen() {
        // Regression anchor: any change to seeding or the generator is a
        // compatibility break and must show up here.
        let mut s = RandomStream::new(42);
        assert_eq!(s.next_u64(), 0xD076_4D4F_4476_689F);
        assert_eq!(s.next_u64(), 0x519E_4174_576F_3791);
        let mut s = RandomStream::new(42);
        assert_eq!(s.uniform(), 0.8143051451229099);
    }

    #[test]
    fn equal_seeds_equal_sequences() {
        let mut a = RandomStream::new(7);
        let mut b = RandomStream::new(7);
        let xs: Vec<u8> = (0..1000).map(|_| a.bernoulli(0.5)).collect();
        let ys: Vec<u8> = (0..1000).map(|_| b.bernoulli(0.5)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn degenerate_probabilities() {
        let mut s = RandomStream::new(42);
        assert_eq!(s.bernoulli(1.0), 1);
        assert_eq!(s.bernoulli(0.0), 0);
        assert_eq!(s.draw_count(), 2);
    }

    #[test]
    fn child_ignores_parent_position() {
        let parent = RandomStream::new(9);
        let mut advanced = parent.clone();
        for _ in 0..100 {
            advanced.uniform();
        }
        let mut c1 = parent.child(3);
        let mut c2 = advanced.child(3);
        assert_eq!(c1.next_u64(), c2.next_u64());
        // distinct rows give distinct streams
        let mut c3 = parent.child(4);
        assert_ne!(c1.next_u64(), c3.next_u64());
    }

    #[test]
    fn empirical_mean_within_clt_envelope() {
        for &q in &[0.1, 0.5, 0.9] {
            let mut s = RandomStream::new(123);
            let n = 1_000_000u64;
            let ones: u64 = (0..n).map(|_| u64::from(s.bernoulli(q))).sum();
            let mean = ones as f64 / n as f64;
            let bound = 5.0 * (q * (1.0 - q) / n as f64).sqrt();
            assert!(
                (mean - q).abs() < bound,
                "q={q}: mean {mean} outside {bound}"
            );
        }
    }
}
