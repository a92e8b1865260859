//! Deterministic random matrices for unit tests.

use super::dense::SymMatrix;

/// Minimal 64-bit linear congruential generator; adequate for test fixtures.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(
            seed.wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407),
        )
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn random_symmetric(n: usize, seed: u64) -> SymMatrix {
    let mut rng = Lcg::new(seed);
    SymMatrix::from_lower_fn(n, |_, _| 2.0 * rng.uniform() - 1.0)
}

/// `G Gᵀ + n I` with G uniform in [-1, 1).
pub fn random_spd(n: usize, seed: u64) -> SymMatrix {
    let mut rng = Lcg::new(seed);
    let g: Vec<f64> = (0..n * n).map(|_| 2.0 * rng.uniform() - 1.0).collect();
    SymMatrix::from_lower_fn(n, |i, j| {
        let s: f64 = (0..n).map(|k| g[i * n + k] * g[j * n + k]).sum();
        s + if i == j { n as f64 } else { 0.0 }
    })
}
