//! Truncated single-mode Fock-space states.
//!
//! Every state here is a real-parameter Gaussian (or a number state), so the
//! amplitudes come from a single three-term recurrence. For
//! `|β, r⟩ = D(β) S(r) |0⟩` with `S(r) = exp[r(a†² − a²)/2]` and `t = tanh r`:
//!
//! ```text
//! c_0     = exp(−β²(1 − t)/2) / sqrt(cosh r)
//! c_{n+1} = (β(1 − t) c_n + t sqrt(n) c_{n−1}) / sqrt(n + 1)
//! ```
//!
//! which follows from `(cosh r · a − sinh r · a†)|β, r⟩ = β(cosh r − sinh r)|β, r⟩`.
//! `r = 0` gives the coherent state and `β = 0` the squeezed vacuum. For
//! `β, r ≥ 0` both terms are non-negative, so the recurrence never cancels.
//!
//! Truncation is controlled by a bound on the second-moment-weighted tail
//! `Σ_{n>K} n² |c_n|²`. It dominates the discarded probability and the
//! truncation error of every moment reported by [`SingleModeMoments`].

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Largest cutoff any constructor or [`choose_cutoff`] will accept.
pub const CUTOFF_CEILING: usize = 4096;

/// Truncation tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A single-mode state description, before truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum SingleModeState {
    Fock { n: usize },
    Coherent { alpha: f64 },
    SqueezedVacuum { r: f64 },
    SqueezedCoherent { beta: f64, r: f64 },
}

impl SingleModeState {
    pub fn validate(&self) -> Result<()> {
        let non_negative = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be a finite non-negative real, got {v}"
                )))
            }
        };
        match *self {
            SingleModeState::Fock { .. } => Ok(()),
            SingleModeState::Coherent { alpha } => non_negative("alpha", alpha),
            SingleModeState::SqueezedVacuum { r } => non_negative("r", r),
            SingleModeState::SqueezedCoherent { beta, r } => {
                non_negative("beta", beta)?;
                non_negative("r", r)
            }
        }
    }

    /// Builds the state at the smallest cutoff meeting `tol`.
    pub fn build(&self, tol: f64) -> Result<FockVector> {
        let cutoff = choose_cutoff(self, tol)?;
        self.build_with_cutoff(cutoff, tol)
    }

    pub fn build_with_cutoff(&self, cutoff: usize, tol: f64) -> Result<FockVector> {
        match *self {
            SingleModeState::Fock { n } => FockVector::fock(n, cutoff),
            SingleModeState::Coherent { alpha } => FockVector::coherent(alpha, cutoff, tol),
            SingleModeState::SqueezedVacuum { r } => FockVector::squeezed_vacuum(r, cutoff, tol),
            SingleModeState::SqueezedCoherent { beta, r } => {
                FockVector::squeezed_coherent(beta, r, cutoff, tol)
            }
        }
    }

    /// Plain truncation at `cutoff` with no tolerance check; `tail_mass` is
    /// the observed normalization deficit. Meant for tiny explicit fixtures.
    pub fn truncated(&self, cutoff: usize) -> FockVector {
        let cutoff = cutoff.min(CUTOFF_CEILING);
        let amps: Vec<f64> = match *self {
            SingleModeState::Fock { n } => (0..=cutoff).map(|k| if k == n { 1.0 } else { 0.0 }).collect(),
            SingleModeState::Coherent { alpha } => gaussian_amplitudes(alpha, 0.0, cutoff + 1),
            SingleModeState::SqueezedVacuum { r } => gaussian_amplitudes(0.0, r, cutoff + 1),
            SingleModeState::SqueezedCoherent { beta, r } => gaussian_amplitudes(beta, r, cutoff + 1),
        };
        let norm: CompensatedSum = amps.iter().map(|c| c * c).collect();
        FockVector {
            cutoff,
            coeffs: amps.into_iter().map(|c| Complex64::new(c, 0.0)).collect(),
            tail_mass: (1.0 - norm.value()).max(0.0),
        }
    }

    /// Bound on `Σ_{n>cutoff} n²|c_n|²`. Infinite when no bound is available
    /// at this cutoff (e.g. still below the bulk of the distribution).
    pub fn tail_bound(&self, cutoff: usize) -> f64 {
        match *self {
            SingleModeState::Fock { n } => {
                if n <= cutoff {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            SingleModeState::Coherent { alpha } => poisson_weighted_tail(alpha * alpha, cutoff),
            SingleModeState::SqueezedVacuum { r } => squeezed_vacuum_weighted_tail(r, cutoff),
            SingleModeState::SqueezedCoherent { beta, r } => {
                let horizon = sc_horizon(cutoff);
                let p = probabilities(&gaussian_amplitudes(beta, r, horizon + 1));
                sc_weighted_tail(&p, r.tanh(), cutoff)
            }
        }
    }
}

/// Truncated single-mode state `Σ_{n≤K} c_n |n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    coeffs: Vec<Complex64>,
    tail_mass: f64,
}

impl FockVector {
    /// Number state `|n⟩`.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::CutoffTooSmall {
                cutoff,
                reason: format!("Fock index {n} exceeds the cutoff"),
            });
        }
        check_ceiling(cutoff)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Ok(Self {
            cutoff,
            coeffs,
            tail_mass: 0.0,
        })
    }

    /// Coherent state `|α⟩` with real `α ≥ 0`.
    pub fn coherent(alpha: f64, cutoff: usize, tol: f64) -> Result<Self> {
        Self::gaussian(SingleModeState::Coherent { alpha }, 0.0, alpha, cutoff, tol)
    }

    /// Squeezed vacuum `S(r)|0⟩`, `⟨n⟩ = sinh² r`.
    pub fn squeezed_vacuum(r: f64, cutoff: usize, tol: f64) -> Result<Self> {
        Self::gaussian(SingleModeState::SqueezedVacuum { r }, r, 0.0, cutoff, tol)
    }

    /// Squeezed coherent state `D(β) S(r)|0⟩`.
    pub fn squeezed_coherent(beta: f64, r: f64, cutoff: usize, tol: f64) -> Result<Self> {
        Self::gaussian(SingleModeState::SqueezedCoherent { beta, r }, r, beta, cutoff, tol)
    }

    fn gaussian(state: SingleModeState, r: f64, beta: f64, cutoff: usize, tol: f64) -> Result<Self> {
        state.validate()?;
        check_tol(tol)?;
        check_ceiling(cutoff)?;
        let (amps, tail) = match state {
            SingleModeState::SqueezedCoherent { .. } => {
                let horizon = sc_horizon(cutoff);
                let mut amps = gaussian_amplitudes(beta, r, horizon + 1);
                let tail = sc_weighted_tail(&probabilities(&amps), r.tanh(), cutoff);
                amps.truncate(cutoff + 1);
                (amps, tail)
            }
            _ => (gaussian_amplitudes(beta, r, cutoff + 1), state.tail_bound(cutoff)),
        };
        if tail > tol {
            return Err(Error::CutoffTooSmall {
                cutoff,
                reason: format!("tail bound {tail:e} exceeds tolerance {tol:e}"),
            });
        }
        let norm: CompensatedSum = amps.iter().map(|c| c * c).collect();
        let drift = (norm.value() - 1.0).abs();
        if drift > tail + rounding_allowance(cutoff) {
            return Err(Error::NormalizationDrift {
                drift,
                tail_mass: tail,
            });
        }
        Ok(Self {
            cutoff,
            coeffs: amps.into_iter().map(|c| Complex64::new(c, 0.0)).collect(),
            tail_mass: tail,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Upper bound on the probability discarded by truncation.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.norm_sqr())
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn moments(&self) -> SingleModeMoments {
        moments(self)
    }
}

/// Photon-number statistics of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleModeMoments {
    /// ⟨n̂⟩
    pub n_mean: f64,
    /// ⟨n̂²⟩
    pub n2_mean: f64,
    /// ⟨â†²â²⟩
    pub a2dag_a2: f64,
    /// |⟨ψ|0⟩|²
    pub vac_overlap_sq: f64,
}

impl SingleModeMoments {
    /// Single-mode second-order coherence `⟨â†²â²⟩ / ⟨n̂⟩²`.
    pub fn g2(&self) -> f64 {
        self.a2dag_a2 / (self.n_mean * self.n_mean)
    }
}

/// Direct compensated summation over the retained amplitudes.
pub fn moments(state: &FockVector) -> SingleModeMoments {
    let mut n1 = CompensatedSum::new();
    let mut n2 = CompensatedSum::new();
    let mut fact2 = CompensatedSum::new();
    for (n, c) in state.coeffs.iter().enumerate() {
        let p = c.norm_sqr();
        let n = n as f64;
        n1.add(n * p);
        n2.add(n * n * p);
        fact2.add(n * (n - 1.0) * p);
    }
    SingleModeMoments {
        n_mean: n1.value(),
        n2_mean: n2.value(),
        a2dag_a2: fact2.value(),
        vac_overlap_sq: state.coeffs[0].norm_sqr(),
    }
}

/// Smallest cutoff whose weighted tail bound is at most `tol`.
pub fn choose_cutoff(state: &SingleModeState, tol: f64) -> Result<usize> {
    choose_cutoff_with_ceiling(state, tol, CUTOFF_CEILING)
}

pub fn choose_cutoff_with_ceiling(state: &SingleModeState, tol: f64, ceiling: usize) -> Result<usize> {
    state.validate()?;
    check_tol(tol)?;
    let infeasible = || Error::InfeasibleTolerance { tol, ceiling };
    match *state {
        SingleModeState::Fock { n } => {
            if n <= ceiling {
                Ok(n)
            } else {
                Err(infeasible())
            }
        }
        SingleModeState::Coherent { .. } | SingleModeState::SqueezedVacuum { .. } => (0..=ceiling)
            .find(|&k| state.tail_bound(k) <= tol)
            .ok_or_else(infeasible),
        SingleModeState::SqueezedCoherent { beta, r } => {
            let horizon = sc_horizon(ceiling);
            let p = probabilities(&gaussian_amplitudes(beta, r, horizon + 1));
            let suffix = weighted_suffix_sums(&p);
            let t = r.tanh();
            (0..=ceiling)
                .find(|&k| sc_tail_from_suffix(&p, &suffix, t, k) <= tol)
                .ok_or_else(infeasible)
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

fn check_ceiling(cutoff: usize) -> Result<()> {
    if cutoff > CUTOFF_CEILING {
        Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} above the ceiling {CUTOFF_CEILING}"
        )))
    } else {
        Ok(())
    }
}

/// Floating-point slack allowed between `Σ|c_n|²` and `1 − tail`.
pub fn rounding_allowance(cutoff: usize) -> f64 {
    16.0 * f64::EPSILON * (cutoff as f64 + 1.0)
}

fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(2 * CUTOFF_CEILING + 16);
        t.push(0.0);
        for k in 1..(2 * CUTOFF_CEILING + 16) {
            let prev = t[k - 1];
            t.push(prev + (k as f64).ln());
        }
        t
    });
    table.get(n).copied().unwrap_or_else(|| {
        let start = table.len() - 1;
        (start + 1..=n).fold(table[start], |acc, k| acc + (k as f64).ln())
    })
}

fn ln_cosh(r: f64) -> f64 {
    r + (-2.0 * r).exp().ln_1p() - std::f64::consts::LN_2
}

fn poisson_weighted_tail(lambda: f64, cutoff: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let n = cutoff as f64 + 1.0;
    // w_{m+1}/w_m = λ(m+1)/m² is decreasing for m ≥ 1
    let q = lambda * (n + 1.0) / (n * n);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let ln_p = -lambda + n * lambda.ln() - ln_factorial(cutoff + 1);
    n * n * ln_p.exp() / (1.0 - q)
}

fn squeezed_vacuum_weighted_tail(r: f64, cutoff: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let t = r.tanh();
    let m = cutoff / 2 + 1;
    let mf = m as f64;
    // w_{m+1}/w_m = t²(m+1)(2m+1)/(2m²) is decreasing in m
    let q = t * t * (mf + 1.0) * (2.0 * mf + 1.0) / (2.0 * mf * mf);
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let ln_p = ln_factorial(2 * m) - 2.0 * ln_factorial(m) - mf * 4f64.ln() + 2.0 * mf * t.ln()
        - ln_cosh(r);
    4.0 * mf * mf * ln_p.exp() / (1.0 - q)
}

fn sc_horizon(cutoff: usize) -> usize {
    (2 * cutoff).max(cutoff + 512)
}

fn probabilities(amps: &[f64]) -> Vec<f64> {
    amps.iter().map(|c| c * c).collect()
}

/// `suffix[k] = Σ_{n≥k} n² p_n`, accumulated from the small end.
fn weighted_suffix_sums(p: &[f64]) -> Vec<f64> {
    let mut suffix = vec![0.0; p.len() + 1];
    let mut acc = CompensatedSum::new();
    for n in (0..p.len()).rev() {
        acc.add((n * n) as f64 * p[n]);
        suffix[n] = acc.value();
    }
    suffix
}

fn sc_weighted_tail(p: &[f64], t: f64, cutoff: usize) -> f64 {
    let suffix = weighted_suffix_sums(p);
    sc_tail_from_suffix(p, &suffix, t, cutoff)
}

/// Explicit tail up to the computed horizon plus a geometric estimate beyond
/// it, using the larger of `tanh² r` and the last observed two-step ratio.
fn sc_tail_from_suffix(p: &[f64], suffix: &[f64], t: f64, cutoff: usize) -> f64 {
    let last = p.len() - 1;
    if cutoff >= last {
        return 0.0;
    }
    let w = |n: usize| (n * n) as f64 * p[n];
    let mut q = t * t;
    for n in [last - 3, last - 2] {
        if w(n) > 0.0 {
            q = q.max(w(n + 2) / w(n));
        }
    }
    let beyond = if w(last) + w(last - 1) == 0.0 {
        0.0
    } else if q >= 1.0 {
        f64::INFINITY
    } else {
        (w(last) + w(last - 1)) * q / (1.0 - q)
    };
    suffix[cutoff + 1] + beyond
}

/// Amplitudes `c_0..c_{len−1}` of `D(β)S(r)|0⟩` for `β, r ≥ 0`, with
/// running rescaling so neither `c_0` underflow nor bulk overflow occurs.
pub(crate) fn gaussian_amplitudes(beta: f64, r: f64, len: usize) -> Vec<f64> {
    const BIG: f64 = 1e150;
    const SMALL: f64 = 1e-150;
    let t = r.tanh();
    let u = beta * (1.0 - t);
    let mut ln_scale = -0.5 * beta * beta * (1.0 - t) - 0.5 * ln_cosh(r);
    let mut out = Vec::with_capacity(len);
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    for n in 0..len {
        out.push(if cur == 0.0 {
            0.0
        } else {
            cur.signum() * (ln_scale + cur.abs().ln()).exp()
        });
        let nf = n as f64;
        let next = (u * cur + t * nf.sqrt() * prev) / (nf + 1.0).sqrt();
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > BIG {
            prev /= BIG;
            cur /= BIG;
            ln_scale += BIG.ln();
        } else if mag > 0.0 && mag < SMALL {
            prev /= SMALL;
            cur /= SMALL;
            ln_scale += SMALL.ln();
        }
    }
    out
}
