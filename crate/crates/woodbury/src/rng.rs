//! Counter-based pseudorandom generator for reproducible test instances.
//!
//! The stream is the splitmix64 sequence: output `i` (0-based) for seed `s`
//! is `finalize(s + (i + 1) * 0x9E3779B97F4A7C15)` with the standard
//! splitmix64 finalizer, so any implementation in any language can
//! reproduce an instance from `(seed, counter)` alone. Gaussians come from
//! Box-Muller applied to consecutive uniforms.

use num_complex::Complex64;

use crate::matrix::ComplexMatrix;

const GAMMA: u64 = 0x9E3779B97F4A7C15;

#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe to feed into a logarithm.
    fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]` by modular reduction. The tiny modulo
    /// bias is irrelevant for instance generation.
    pub fn next_int(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Standard complex Gaussian (unit variance overall): one Box-Muller
    /// pair supplies the real and imaginary parts.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(radius * angle.cos(), radius * angle.sin()).scale(std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.next_complex_gaussian())
    }

    /// Matrix of Gaussian integers with components in `[-bound, bound]`;
    /// exact in f64, used by the discrete-entry searches.
    pub fn gaussian_integer_matrix(&mut self, rows: usize, cols: usize, bound: i64) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(
                self.next_int(-bound, bound) as f64,
                self.next_int(-bound, bound) as f64,
            )
        })
    }
}
