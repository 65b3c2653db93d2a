//! Explicit single-mode photon-loss Kraus operators on a truncated space.
//!
//! ```text
//! Π_k(θ) = sqrt((1−η)^k / k!) · exp(i 2lθ (n̂ − δk)) · η^{n̂/2} · â^k
//! ```
//!
//! Used to check completeness and the reduced generators
//! `Γ = 2lχ n̂`, `Λ = 4l²(χ² n̂² + γ n̂)` that the loss model relies on.
//! `â^k` only lowers, so on a cutoff-`K` space the family with
//! `k = 0..=K` is exact, not an approximation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::loss::LossConfig;

#[derive(Debug, Clone)]
pub struct KrausFamily {
    pub cutoff: usize,
    pub loss: LossConfig,
    pub l: u32,
    pub theta: f64,
}

impl KrausFamily {
    fn weight(&self, n: usize, k: usize) -> f64 {
        // sqrt((1−η)^k/k!) · η^{(n−k)/2} · sqrt(n!/(n−k)!)
        let eta = self.loss.eta;
        let mut ln = 0.5 * k as f64 * (1.0 - eta).ln() + 0.5 * (n - k) as f64 * eta.ln();
        for j in 0..k {
            ln += 0.5 * ((n - j) as f64).ln() - 0.5 * ((j + 1) as f64).ln();
        }
        if k > 0 && eta == 1.0 {
            return 0.0;
        }
        ln.exp()
    }

    fn phase(&self, n_out: usize, k: usize) -> Complex64 {
        let arg = 2.0 * self.l as f64 * self.theta * (n_out as f64 - self.loss.delta * k as f64);
        Complex64::from_polar(1.0, arg)
    }

    /// `Π_k` as a `(K+1)×(K+1)` matrix.
    pub fn operator(&self, k: usize) -> DMatrix<Complex64> {
        let dim = self.cutoff + 1;
        let mut m = DMatrix::zeros(dim, dim);
        for n in k..dim {
            let out = n - k;
            m[(out, n)] = self.phase(out, k) * self.weight(n, k);
        }
        m
    }

    /// `dΠ_k/dθ = i 2l (n̂ − δk) Π_k`.
    pub fn derivative(&self, k: usize) -> DMatrix<Complex64> {
        let mut m = self.operator(k);
        let g = 2.0 * self.l as f64;
        for out in 0..m.nrows() {
            let factor = Complex64::new(0.0, g * (out as f64 - self.loss.delta * k as f64));
            for col in 0..m.ncols() {
                m[(out, col)] *= factor;
            }
        }
        m
    }

    pub fn operators(&self) -> Vec<DMatrix<Complex64>> {
        (0..=self.cutoff).map(|k| self.operator(k)).collect()
    }

    /// `Σ_k Π_k† Π_k`
    pub fn completeness_sum(&self) -> DMatrix<Complex64> {
        let dim = self.cutoff + 1;
        self.operators()
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, p| acc + p.adjoint() * p)
    }

    /// `Γ = i Σ_k (dΠ_k†/dθ) Π_k`
    pub fn gamma_generator(&self) -> DMatrix<Complex64> {
        let dim = self.cutoff + 1;
        let i = Complex64::new(0.0, 1.0);
        (0..=self.cutoff).fold(DMatrix::zeros(dim, dim), |acc, k| {
            acc + self.derivative(k).adjoint() * self.operator(k) * i
        })
    }

    /// `Λ = Σ_k (dΠ_k†/dθ)(dΠ_k/dθ)`
    pub fn lambda_generator(&self) -> DMatrix<Complex64> {
        let dim = self.cutoff + 1;
        (0..=self.cutoff).fold(DMatrix::zeros(dim, dim), |acc, k| {
            let dk = self.derivative(k);
            acc + dk.adjoint() * dk
        })
    }
}

/// Largest elementwise `|Σ_k Π_k†Π_k − I|`.
pub fn completeness_deviation(family: &KrausFamily) -> f64 {
    let sum = family.completeness_sum();
    let dim = sum.nrows();
    let mut worst = 0.0f64;
    for j in 0..dim {
        for m in 0..dim {
            let target = if j == m { 1.0 } else { 0.0 };
            worst = worst.max((sum[(j, m)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}
