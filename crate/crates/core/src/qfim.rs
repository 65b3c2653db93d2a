//! Ideal (lossless) quantum Fisher information matrix and Cramér–Rao bound.
//!
//! For the NOON-like probes the QFIM `F_jm = 16 l² Cov(n̂_j, n̂_m)` has the
//! structure `a·I − b·J` (`J` all-ones) with `a = 16 l² ⟨n̂_m²⟩` and
//! `b = 16 l² ⟨n̂_m⟩²`, so `Tr F⁻¹` has a closed form. A dense path is kept
//! next to it purely to falsify that algebra.
//!
//! The estimated angles θ₁..θ_d never enter: the bound does not depend on
//! them for this unitary family.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probe::{multimode_moments, normalization_sq, Probe, ProbeSpec};
use crate::tensor::ExplicitMultimodeState;

/// Largest `d` accepted by the dense inversion path.
pub const DENSE_MAX_DIM: usize = 512;

/// Sensing geometry: OAM quanta per photon `l` and number of estimated
/// displacements `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensingConfig {
    pub l: u32,
    pub d: usize,
}

impl SensingConfig {
    pub fn new(l: u32, d: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("l must be >= 1".into()));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        Ok(Self { l, d })
    }

    /// `16 l²`
    pub fn prefactor(&self) -> f64 {
        let l = self.l as f64;
        16.0 * l * l
    }

    pub(crate) fn check(&self, spec: &ProbeSpec) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidParameter("l must be >= 1".into()));
        }
        if spec.d != self.d {
            return Err(Error::DimensionMismatch {
                probe: spec.d,
                config: self.d,
            });
        }
        Ok(())
    }
}

/// `a·I − b·J` on `dim` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuredQfim {
    pub a: f64,
    pub b: f64,
    pub dim: usize,
}

impl StructuredQfim {
    pub fn element(&self, j: usize, m: usize) -> f64 {
        if j == m {
            self.a - self.b
        } else {
            -self.b
        }
    }

    /// Eigenvalues are `a` (multiplicity `dim − 1`) and `a − dim·b`.
    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.a - self.b > 0.0 && self.a - self.dim as f64 * self.b > 0.0
    }

    /// Sherman–Morrison: `Tr (aI − bJ)⁻¹ = d/a · (1 + b/(a − d b))`.
    pub fn trace_inverse(&self) -> Result<f64> {
        if !self.is_positive_definite() {
            return Err(Error::Singular(format!(
                "a = {}, b = {}, d = {}",
                self.a, self.b, self.dim
            )));
        }
        let d = self.dim as f64;
        Ok(d / self.a * (1.0 + self.b / (self.a - d * self.b)))
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.dim > DENSE_MAX_DIM {
            return Err(Error::TooLarge {
                d: self.dim,
                max: DENSE_MAX_DIM,
            });
        }
        Ok(DMatrix::from_fn(self.dim, self.dim, |j, m| self.element(j, m)))
    }
}

/// Trace of the inverse of a symmetric positive-definite matrix via Cholesky.
pub fn dense_trace_inverse(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() > DENSE_MAX_DIM {
        return Err(Error::TooLarge {
            d: m.nrows(),
            max: DENSE_MAX_DIM,
        });
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("Cholesky factorization failed".into()))?;
    Ok(chol.inverse().trace())
}

pub fn qfim(spec: &ProbeSpec, cfg: &SensingConfig) -> Result<StructuredQfim> {
    cfg.check(spec)?;
    let m = multimode_moments(spec);
    let f = StructuredQfim {
        a: cfg.prefactor() * m.n2_m,
        b: cfg.prefactor() * m.nbar_m * m.nbar_m,
        dim: cfg.d,
    };
    if !f.is_positive_definite() {
        return Err(Error::Singular(format!("QFIM not positive definite: {f:?}")));
    }
    Ok(f)
}

/// Dense QFIM built element by element from `16 l² Cov(n̂_j, n̂_m)`, with
/// `⟨n̂_j n̂_m⟩ = 0` for `j ≠ m`.
pub fn qfim_dense(spec: &ProbeSpec, cfg: &SensingConfig) -> Result<DMatrix<f64>> {
    cfg.check(spec)?;
    if cfg.d > DENSE_MAX_DIM {
        return Err(Error::TooLarge {
            d: cfg.d,
            max: DENSE_MAX_DIM,
        });
    }
    let m = multimode_moments(spec);
    let g = cfg.prefactor();
    Ok(DMatrix::from_fn(cfg.d, cfg.d, |j, k| {
        let second = if j == k { m.n2_m } else { 0.0 };
        g * (second - m.nbar_m * m.nbar_m)
    }))
}

fn qcrb_from(nbar: f64, g2: f64, d: usize, cfg: &SensingConfig) -> Result<f64> {
    let d = d as f64;
    let denom = g2 + 1.0 / nbar - d;
    if !(nbar > 0.0 && denom > 0.0) {
        return Err(Error::Singular(format!(
            "g2 + 1/nbar - d = {denom} for nbar = {nbar}"
        )));
    }
    Ok(d / (cfg.prefactor() * (nbar * nbar * g2 + nbar)) * (1.0 + 1.0 / denom))
}

/// `d / (16 l² (n̄² g + n̄)) · (1 + 1/(g + 1/n̄ − d))` in rad².
pub fn qcrb_ideal(spec: &ProbeSpec, cfg: &SensingConfig) -> Result<f64> {
    cfg.check(spec)?;
    let m = multimode_moments(spec);
    qcrb_from(m.nbar_m, m.g2_m, cfg.d, cfg)
}

/// The same bound evaluated from per-family parameter formulas, without
/// going through [`multimode_moments`].
pub fn qcrb_ideal_per_state(spec: &ProbeSpec, cfg: &SensingConfig) -> Result<f64> {
    cfg.check(spec)?;
    let (nbar, g2) = per_state_moments(spec);
    qcrb_from(nbar, g2, cfg.d, cfg)
}

/// `(n̄_m, g⁽²⁾_m)` written out per family.
pub(crate) fn per_state_moments(spec: &ProbeSpec) -> (f64, f64) {
    let ns = normalization_sq(spec);
    match spec.probe {
        Probe::Noon { n } => {
            let nbar = ns * n as f64;
            (nbar, (n as f64 - 1.0) / nbar)
        }
        Probe::Coherent { alpha } => (ns * alpha * alpha, 1.0 / ns),
        Probe::SqueezedVacuum { r } => {
            let s2 = r.sinh().powi(2);
            (ns * s2, (3.0 * s2 + 1.0) / (ns * s2))
        }
        Probe::SqueezedCoherent { beta, r } => {
            let (b2, s2) = (beta * beta, r.sinh().powi(2));
            let nbar = ns * (b2 + s2);
            let a2 = b2 * b2
                + b2 * (2.0 * r.sinh() * r.cosh() + 4.0 * s2)
                + 3.0 * s2 * s2
                + s2;
            (nbar, ns * a2 / (nbar * nbar))
        }
    }
}

/// Checks `⟨Ψ|[2l n̂_j, 2l n̂_m]|Ψ⟩ = 0` for every mode pair on an explicit
/// three-mode (`d = 2`) tensor fixture at cutoff 6 (or `N` for larger
/// Fock states).
pub fn saturation_commutator_check(probe: Probe, l: u32) -> Result<bool> {
    probe.validate()?;
    let cutoff = match probe {
        Probe::Noon { n } => (n as usize).max(6),
        _ => 6,
    };
    let single = probe.single_mode().truncated(cutoff);
    let fixture = ExplicitMultimodeState::noon_like(&single, 2)?;
    let g = 2.0 * l as f64;
    for j in 0..fixture.modes() {
        for m in 0..fixture.modes() {
            if fixture.commutator_expectation(j, m, g).norm() != 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
