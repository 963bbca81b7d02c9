//! Deterministic, splittable pseudo-random number generation.
//!
//! All randomness in the library flows from a single seed through
//! [`SplitMix64`] — the mixer from Steele, Lea & Flood's SplittableRandom
//! (the constants below are the canonical ones used by Java's
//! `SplittableRandom` and by `rand`'s `SplitMix64`). The algorithm is small
//! enough to reimplement from this file alone in any language, so kernels,
//! datasets, and training runs are reproducible from a seed across
//! implementations. There is no global generator; every consumer receives an
//! explicit stream, and independent subsystems get independent streams via
//! [`SplitMix64::split`].

/// SplitMix64 generator with a Box–Muller cache for normal deviates.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    /// Derive an independent child stream. The child is seeded from the next
    /// output of this stream, so split order matters and is part of the
    /// reproducibility contract.
    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1): the top 53 bits scaled by 2⁻⁵³.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [0, n). `n` must be nonzero. Uses rejection
    /// sampling on the high bits so the distribution is exact.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Standard normal deviate via Box–Muller. Generates pairs; the second
    /// value of each pair is cached and returned on the following call.
    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        // 1 - u keeps the argument of ln strictly positive.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    /// Normal deviate with the given standard deviation.
    pub fn normal_scaled(&mut self, std_dev: f64) -> f64 {
        self.normal() * std_dev
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }

    /// Serializable generator state: (state word, cached normal if any).
    pub fn state(&self) -> (u64, Option<f64>) {
        (self.state, self.spare_normal)
    }

    pub fn from_state(state: u64, spare_normal: Option<f64>) -> Self {
        Self {
            state,
            spare_normal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_sequence() {
        // First outputs for seed 1234567, cross-checked against the
        // published SplitMix64 reference implementation.
        let mut rng = SplitMix64::new(1234567);
        let got: [u64; 3] = [rng.next_u64(), rng.next_u64(), rng.next_u64()];
        assert_eq!(
            got,
            [
                6457827717110365317,
                3203168211198807973,
                9817491932198370423
            ]
        );
    }

    #[test]
    fn normal_reference_sequence() {
        // Frozen first draws for seed 42. These pin the Box-Muller draw
        // order (u1 = 1 - next_f64, u2 = next_f64, cosine first, sine
        // cached) for reimplementations.
        let mut rng = SplitMix64::new(42);
        let expect = [
            8.82248906222268814e-1,
            1.38847328528770708e0,
            -4.50849875718860094e-1,
            6.70716440902429101e-1,
        ];
        for e in expect {
            assert!((rng.normal() - e).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
            assert!(a.normal().to_bits() == b.normal().to_bits());
        }
    }

    #[test]
    fn split_streams_differ() {
        let mut root = SplitMix64::new(7);
        let mut c1 = root.split();
        let mut c2 = root.split();
        assert_ne!(c1.next_u64(), c2.next_u64());
    }

    #[test]
    fn uniform_in_range() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..1000 {
            let v = rng.next_f64();
            assert!((0.0..1.0).contains(&v));
            let idx = rng.next_index(7);
            assert!(idx < 7);
        }
    }

    #[test]
    fn normal_moments_roughly_standard() {
        let mut rng = SplitMix64::new(99);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let v = rng.normal();
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
