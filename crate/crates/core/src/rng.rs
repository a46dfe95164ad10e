//! Counter-based deterministic random draws.
//!
//! Every randomized suite ("20 seeded parameters", scattered point sets)
//! pulls values as a pure function of `(seed, counter)`, so reports are
//! reproducible bit-for-bit regardless of call order or thread scheduling.

use num_complex::Complex64;

/// SplitMix64 finalizer over `seed + counter * golden_gamma`.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn u64(&self, counter: u64) -> u64 {
        let mut z = self
            .seed
            .wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.u64(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(lo, hi)` (open on both sides by nudging).
    pub fn uniform_in(&self, counter: u64, lo: f64, hi: f64) -> f64 {
        let u = self.uniform(counter).clamp(1e-12, 1.0 - 1e-12);
        lo + (hi - lo) * u
    }

    /// Standard normal via Box-Muller on counters `2 c` and `2 c + 1`.
    pub fn normal(&self, counter: u64) -> f64 {
        let u1 = self.uniform(2 * counter).max(1e-300);
        let u2 = self.uniform(2 * counter + 1);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Uniform direction in `R^n` (normalized Gaussian vector).
    pub fn unit_vector(&self, counter: u64, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n)
            .map(|i| self.normal(counter * 64 + i as u64))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            // astronomically unlikely; retry on a shifted counter
            return self.unit_vector(counter + (1 << 40), n);
        }
        for x in &mut v {
            *x /= norm;
        }
        v
    }

    /// Complex number on the unit circle.
    pub fn unit_complex(&self, counter: u64) -> Complex64 {
        let phase = 2.0 * std::f64::consts::PI * self.uniform(counter);
        Complex64::new(phase.cos(), phase.sin())
    }
}
