//! Photon loss: variational QFIM bound, optimal variational parameter,
//! lossy Cramér–Rao bound and robustness.
//!
//! With uniform transmissivity `η` and variational parameter `δ` on every
//! mode, the enlarged-space QFIM is again `A·I − B·J` with
//!
//! ```text
//! A = 16 l² N̆² σ,   σ = χ²⟨ψ|n̂²|ψ⟩ + γ⟨ψ|n̂|ψ⟩
//! B = 16 l² χ² ⟨n̂_m⟩²
//! χ = 1 − (1+δ)(1−η),   γ = η(1−η)(1+δ)²
//! ```
//!
//! so the bound never needs the system–environment state itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_section_max;
use crate::probe::{multimode_moments, ProbeSpec};
use crate::qfim::{per_state_moments, qcrb_ideal, SensingConfig, StructuredQfim};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    /// Transmissivity in `(0, 1]`.
    pub eta: f64,
    /// `0`: loss before the prisms, `−1`: loss after.
    pub delta: f64,
}

impl LossConfig {
    pub fn new(eta: f64, delta: f64) -> Result<Self> {
        check_eta(eta)?;
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
        }
        Ok(Self { eta, delta })
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelCoefficients {
    pub chi: f64,
    pub gamma: f64,
}

pub fn channel_coefficients(loss: &LossConfig) -> ChannelCoefficients {
    let u = 1.0 + loss.delta;
    ChannelCoefficients {
        chi: 1.0 - u * (1.0 - loss.eta),
        gamma: loss.eta * (1.0 - loss.eta) * u * u,
    }
}

struct LossTerms {
    norm_sq: f64,
    sigma: f64,
    chi: f64,
    n_mean: f64,
}

fn loss_terms(spec: &ProbeSpec, loss: &LossConfig) -> Result<LossTerms> {
    check_eta(loss.eta)?;
    let m = multimode_moments(spec);
    let c = channel_coefficients(loss);
    let (n1, n2) = (m.single_n_mean(), m.single_n2_mean());
    Ok(LossTerms {
        norm_sq: m.norm_sq,
        sigma: c.chi * c.chi * n2 + c.gamma * n1,
        chi: c.chi,
        n_mean: n1,
    })
}

/// The enlarged-space QFIM `C_Q` in structured form.
pub fn cq_matrix(spec: &ProbeSpec, cfg: &SensingConfig, loss: &LossConfig) -> Result<StructuredQfim> {
    cfg.check(spec)?;
    let t = loss_terms(spec, loss)?;
    let nbar_m = t.norm_sq * t.n_mean;
    Ok(StructuredQfim {
        a: cfg.prefactor() * t.norm_sq * t.sigma,
        b: cfg.prefactor() * t.chi * t.chi * nbar_m * nbar_m,
        dim: cfg.d,
    })
}

/// `Tr C_Q⁻¹ = (d−1)N̆⁻²/(16l²σ) + N̆⁻²/(16l²[σ − dN̆²χ²⟨ψ|n̂|ψ⟩²])`.
pub fn cq_trace_inverse_exact(spec: &ProbeSpec, cfg: &SensingConfig, loss: &LossConfig) -> Result<f64> {
    cfg.check(spec)?;
    let t = loss_terms(spec, loss)?;
    let d = cfg.d as f64;
    let g = cfg.prefactor();
    let second = t.sigma - d * t.norm_sq * t.chi * t.chi * t.n_mean * t.n_mean;
    if !(t.sigma > 0.0 && second > 0.0) {
        return Err(Error::Singular(format!(
            "C_Q not positive definite (sigma = {}, reduced = {second})",
            t.sigma
        )));
    }
    Ok((d - 1.0) / (t.norm_sq * g * t.sigma) + 1.0 / (t.norm_sq * g * second))
}

/// First term of [`cq_trace_inverse_exact`] only, the `d ≫ 1` form.
pub fn cq_trace_inverse_large_d(spec: &ProbeSpec, cfg: &SensingConfig, loss: &LossConfig) -> Result<f64> {
    cfg.check(spec)?;
    let t = loss_terms(spec, loss)?;
    if t.sigma.is_nan() || t.sigma <= 0.0 {
        return Err(Error::Singular(format!("sigma = {}", t.sigma)));
    }
    Ok((cfg.d as f64 - 1.0) / (t.norm_sq * cfg.prefactor() * t.sigma))
}

/// Closed-form maximizer over `δ` of the large-`d` bound:
/// `⟨n̂²⟩ / ((1−η)⟨n̂²⟩ + η⟨n̂⟩) − 1`.
///
/// Always `≥ 0` because `⟨n̂²⟩ ≥ ⟨n̂⟩` for photon counts; it is not clamped
/// to the physical anchors `[−1, 0]`.
pub fn delta_opt(spec: &ProbeSpec, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let m = multimode_moments(spec);
    let (n1, n2) = (m.single_n_mean(), m.single_n2_mean());
    Ok(n2 / ((1.0 - eta) * n2 + eta * n1) - 1.0)
}

/// Numeric maximizer of [`cq_trace_inverse_large_d`] over `δ ∈ [lo, hi]`,
/// by golden-section search. Returns `(δ*, value)`.
pub fn delta_argmax_numeric(
    spec: &ProbeSpec,
    cfg: &SensingConfig,
    eta: f64,
    lo: f64,
    hi: f64,
    delta_tol: f64,
) -> Result<(f64, f64)> {
    check_eta(eta)?;
    cfg.check(spec)?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
    }
    // σ(δ) is convex, so the bound is unimodal in δ
    let objective = |delta: f64| {
        cq_trace_inverse_large_d(spec, cfg, &LossConfig { eta, delta }).unwrap_or(f64::NEG_INFINITY)
    };
    Ok(golden_section_max(objective, lo, hi, delta_tol))
}

fn qcrb_lossy_from(nbar: f64, g2: f64, cfg: &SensingConfig, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if cfg.d < 2 {
        return Err(Error::Domain(
            "the large-d lossy bound needs d >= 2; use cq_trace_inverse_exact for d = 1".into(),
        ));
    }
    let d = cfg.d as f64;
    Ok((d - 1.0) / (cfg.prefactor() * nbar) * ((1.0 - eta) / eta + 1.0 / (1.0 + nbar * g2)))
}

/// `(d−1)/(16l² n̄) · ((1−η)/η + 1/(1 + n̄ g⁽²⁾))` in rad².
pub fn qcrb_lossy(spec: &ProbeSpec, cfg: &SensingConfig, eta: f64) -> Result<f64> {
    cfg.check(spec)?;
    let m = multimode_moments(spec);
    qcrb_lossy_from(m.nbar_m, m.g2_m, cfg, eta)
}

/// Lossy bound from the per-family parameter formulas.
pub fn qcrb_lossy_per_state(spec: &ProbeSpec, cfg: &SensingConfig, eta: f64) -> Result<f64> {
    cfg.check(spec)?;
    let (nbar, g2) = per_state_moments(spec);
    qcrb_lossy_from(nbar, g2, cfg, eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Robustness {
    /// Lossy large-d bound minus the ideal bound.
    pub value: f64,
    /// Exact `Tr C_Q⁻¹` at `δ_opt` minus the ideal bound.
    pub exact_minus_ideal: f64,
}

/// `R = QCRB_lossy − QCRB_ideal`; smaller means more loss tolerant.
pub fn robustness(spec: &ProbeSpec, cfg: &SensingConfig, eta: f64) -> Result<Robustness> {
    let lossy = qcrb_lossy(spec, cfg, eta)?;
    let ideal = qcrb_ideal(spec, cfg)?;
    let delta = delta_opt(spec, eta)?;
    let exact = cq_trace_inverse_exact(spec, cfg, &LossConfig { eta, delta })?;
    Ok(Robustness {
        value: lossy - ideal,
        exact_minus_ideal: exact - ideal,
    })
}
