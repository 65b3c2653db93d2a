//! Explicit `(d+1)`-mode state vectors for tiny `d` and cutoff.
//!
//! Only used as a brute-force fixture: it materializes the superposition on
//! the full tensor-product space so reduction rules (cross terms vanish,
//! per-mode moments scale by `N̆²`) can be checked against it directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockVector;

/// Largest tensor-space dimension the fixture will allocate.
pub const MAX_DIM: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct ExplicitMultimodeState {
    modes: usize,
    local_dim: usize,
    amplitudes: Vec<Complex64>,
}

impl ExplicitMultimodeState {
    /// Normalized `Σ_m |0…ψ_m…0⟩` over `d + 1` modes.
    pub fn noon_like(single: &FockVector, d: usize) -> Result<Self> {
        let modes = d + 1;
        let local_dim = single.cutoff() + 1;
        let dim = local_dim
            .checked_pow(modes as u32)
            .filter(|&n| n <= MAX_DIM)
            .ok_or(Error::TooLarge { d, max: MAX_DIM })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        for m in 0..modes {
            let stride = local_dim.pow(m as u32);
            for (n, c) in single.coeffs().iter().enumerate() {
                amplitudes[n * stride] += c;
            }
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            modes,
            local_dim,
            amplitudes,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.local_dim.pow(mode as u32)) % self.local_dim
    }

    /// Applies `n̂_mode` to a vector on this space.
    fn apply_number(&self, mode: usize, v: &[Complex64]) -> Vec<Complex64> {
        v.iter()
            .enumerate()
            .map(|(i, a)| a * self.occupation(i, mode) as f64)
            .collect()
    }

    fn expectation(&self, v: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(v)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨n̂_j n̂_m⟩`.
    pub fn number_correlation(&self, j: usize, m: usize) -> f64 {
        let v = self.apply_number(j, &self.apply_number(m, &self.amplitudes));
        self.expectation(&v).re
    }

    /// `⟨n̂_m⟩`.
    pub fn number_mean(&self, m: usize) -> f64 {
        self.expectation(&self.apply_number(m, &self.amplitudes)).re
    }

    /// `⟨[g n̂_j, g n̂_m]⟩` for generator scale `g`, from explicit products
    /// in both orders.
    pub fn commutator_expectation(&self, j: usize, m: usize, g: f64) -> Complex64 {
        let jm = self.apply_number(j, &self.apply_number(m, &self.amplitudes));
        let mj = self.apply_number(m, &self.apply_number(j, &self.amplitudes));
        let diff: Vec<Complex64> = jm.iter().zip(&mj).map(|(a, b)| (a - b) * g * g).collect();
        self.expectation(&diff)
    }
}
