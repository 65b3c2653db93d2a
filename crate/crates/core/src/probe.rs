//! The four balanced `(d+1)`-mode NOON-like probe families
//!
//! ```text
//! |Ψ⟩ = N̆ Σ_{m=0}^{d} |0⟩…|ψ⟩_m…|0⟩,   N̆² = 1 / ((1+d)(1 + d|⟨ψ|0⟩|²))
//! ```
//!
//! with `|ψ⟩` a Fock, coherent, squeezed-vacuum or squeezed-coherent state.
//! Cross terms of the superposition vanish under `n̂_m` and `â_m†²â_m²`, so
//! every per-mode moment is `N̆²` times the single-mode one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::SingleModeState;
use crate::numeric::bisect_increasing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProbeKind {
    #[serde(rename = "MNOONS", alias = "mnoons")]
    Mnoons,
    #[serde(rename = "MECS", alias = "mecs")]
    Mecs,
    #[serde(rename = "MESVS", alias = "mesvs")]
    Mesvs,
    #[serde(rename = "MESCS", alias = "mescs")]
    Mescs,
}

impl ProbeKind {
    /// Canonical output order.
    pub const ALL: [ProbeKind; 4] = [
        ProbeKind::Mnoons,
        ProbeKind::Mecs,
        ProbeKind::Mesvs,
        ProbeKind::Mescs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProbeKind::Mnoons => "MNOONS",
            ProbeKind::Mecs => "MECS",
            ProbeKind::Mesvs => "MESVS",
            ProbeKind::Mescs => "MESCS",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "MNOONS" | "NOON" => Ok(ProbeKind::Mnoons),
            "MECS" | "COHERENT" => Ok(ProbeKind::Mecs),
            "MESVS" | "SQUEEZED" => Ok(ProbeKind::Mesvs),
            "MESCS" | "SQUEEZED_COHERENT" => Ok(ProbeKind::Mescs),
            other => Err(Error::Config(format!("unknown probe kind '{other}'"))),
        }
    }
}

/// Parses a comma-separated probe list; `all` expands to every family.
/// Duplicates are dropped and the result is in canonical order.
pub fn parse_probe_list(s: &str) -> Result<Vec<ProbeKind>> {
    let mut kinds = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            kinds.extend(ProbeKind::ALL);
        } else {
            kinds.push(item.parse()?);
        }
    }
    if kinds.is_empty() {
        return Err(Error::Config("empty probe list".into()));
    }
    kinds.sort();
    kinds.dedup();
    Ok(kinds)
}

/// Single-mode parameters of a probe family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Probe {
    #[serde(rename = "MNOONS")]
    Noon { n: u32 },
    #[serde(rename = "MECS")]
    Coherent { alpha: f64 },
    #[serde(rename = "MESVS")]
    SqueezedVacuum { r: f64 },
    #[serde(rename = "MESCS")]
    SqueezedCoherent { beta: f64, r: f64 },
}

impl Probe {
    pub fn kind(&self) -> ProbeKind {
        match self {
            Probe::Noon { .. } => ProbeKind::Mnoons,
            Probe::Coherent { .. } => ProbeKind::Mecs,
            Probe::SqueezedVacuum { .. } => ProbeKind::Mesvs,
            Probe::SqueezedCoherent { .. } => ProbeKind::Mescs,
        }
    }

    pub fn single_mode(&self) -> SingleModeState {
        match *self {
            Probe::Noon { n } => SingleModeState::Fock { n: n as usize },
            Probe::Coherent { alpha } => SingleModeState::Coherent { alpha },
            Probe::SqueezedVacuum { r } => SingleModeState::SqueezedVacuum { r },
            Probe::SqueezedCoherent { beta, r } => SingleModeState::SqueezedCoherent { beta, r },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
            }
        };
        match *self {
            Probe::Noon { n } => {
                if n == 0 {
                    Err(Error::InvalidParameter("N must be a positive integer".into()))
                } else {
                    Ok(())
                }
            }
            Probe::Coherent { alpha } => positive("alpha", alpha),
            Probe::SqueezedVacuum { r } => positive("r1", r),
            Probe::SqueezedCoherent { beta, r } => {
                if !(beta.is_finite() && beta >= 0.0 && r.is_finite() && r >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "beta and r2 must be finite and >= 0, got beta={beta}, r2={r}"
                    )));
                }
                if beta == 0.0 && r == 0.0 {
                    return Err(Error::InvalidParameter(
                        "beta and r2 cannot both vanish".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Closed-form single-mode moments `(⟨n̂⟩, ⟨n̂²⟩, ⟨â†²â²⟩, |⟨ψ|0⟩|²)`.
    pub(crate) fn analytic_moments(&self) -> AnalyticMoments {
        match *self {
            Probe::Noon { n } => {
                let n = n as f64;
                AnalyticMoments {
                    n_mean: n,
                    a2dag_a2: n * (n - 1.0),
                    vac_overlap_sq: if n == 0.0 { 1.0 } else { 0.0 },
                }
            }
            Probe::Coherent { alpha } => {
                let a2 = alpha * alpha;
                AnalyticMoments {
                    n_mean: a2,
                    a2dag_a2: a2 * a2,
                    vac_overlap_sq: (-a2).exp(),
                }
            }
            Probe::SqueezedVacuum { r } => {
                let s2 = r.sinh().powi(2);
                AnalyticMoments {
                    n_mean: s2,
                    a2dag_a2: s2 * (3.0 * s2 + 1.0),
                    vac_overlap_sq: 1.0 / r.cosh(),
                }
            }
            Probe::SqueezedCoherent { beta, r } => {
                let b2 = beta * beta;
                let s2 = r.sinh().powi(2);
                AnalyticMoments {
                    n_mean: b2 + s2,
                    // ⟨(β+b†)²(β+b)²⟩ with ⟨b²⟩ = sinh r cosh r, ⟨b†b⟩ = sinh² r
                    a2dag_a2: b2 * b2 + b2 * ((2.0 * r).sinh() + 4.0 * s2) + s2 * (3.0 * s2 + 1.0),
                    vac_overlap_sq: (-b2 * (1.0 - r.tanh())).exp() / r.cosh(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AnalyticMoments {
    pub n_mean: f64,
    pub a2dag_a2: f64,
    pub vac_overlap_sq: f64,
}

/// A probe family instance together with the number `d` of estimated
/// displacements (`d + 1` modes in total).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub probe: Probe,
    pub d: usize,
}

impl ProbeSpec {
    pub fn new(probe: Probe, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be >= 1".into()));
        }
        probe.validate()?;
        Ok(Self { probe, d })
    }

    pub fn kind(&self) -> ProbeKind {
        self.probe.kind()
    }
}

/// How the two MESCS parameters are tied together when solving for `N̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum MescsConstraint {
    /// `β² = sinh² r₂`: coherent and squeezing photons split evenly.
    #[default]
    EqualSplit,
    FixedR2(f64),
    FixedBeta(f64),
}

impl fmt::Display for MescsConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MescsConstraint::EqualSplit => f.write_str("equal_split"),
            MescsConstraint::FixedR2(v) => write!(f, "fixed_r2={v}"),
            MescsConstraint::FixedBeta(v) => write!(f, "fixed_beta={v}"),
        }
    }
}

impl FromStr for MescsConstraint {
    type Err = Error;

    /// `equal_split`, `fixed_r2=<value>` or `fixed_beta=<value>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, value) = match s.split_once('=') {
            Some((n, v)) => (n.trim(), Some(v.trim())),
            None => (s, None),
        };
        let number = |v: Option<&str>| -> Result<f64> {
            let v = v.ok_or_else(|| Error::Config(format!("constraint '{name}' needs a value")))?;
            let x: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad constraint value '{v}'")))?;
            if x.is_finite() && x >= 0.0 {
                Ok(x)
            } else {
                Err(Error::Config(format!("constraint value must be >= 0, got {x}")))
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "equal_split" if value.is_none() => Ok(MescsConstraint::EqualSplit),
            "fixed_r2" => Ok(MescsConstraint::FixedR2(number(value)?)),
            "fixed_beta" => Ok(MescsConstraint::FixedBeta(number(value)?)),
            _ => Err(Error::Config(format!("unknown MESCS constraint '{s}'"))),
        }
    }
}

/// Printed closed-form `g⁽²⁾` next to the value actually used, for the two
/// families whose printed form does not match direct evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrintedFormDeviation {
    pub printed_g2: f64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
}

/// Per-mode photon-number statistics of the multimode probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultimodeMoments {
    /// N̆²
    pub norm_sq: f64,
    /// ⟨n̂_m⟩
    pub nbar_m: f64,
    /// ⟨n̂_m²⟩
    pub n2_m: f64,
    /// ⟨â_m†²â_m²⟩ / ⟨n̂_m⟩²
    pub g2_m: f64,
    /// Σ_m ⟨n̂_m⟩
    pub nbar_total: f64,
    pub printed: Option<PrintedFormDeviation>,
}

impl MultimodeMoments {
    fn from_parts(norm_sq: f64, n_mean: f64, a2dag_a2: f64, d: usize) -> Self {
        let nbar_m = norm_sq * n_mean;
        let n2_m = norm_sq * (a2dag_a2 + n_mean);
        Self {
            norm_sq,
            nbar_m,
            n2_m,
            g2_m: norm_sq * a2dag_a2 / (nbar_m * nbar_m),
            nbar_total: (d as f64 + 1.0) * nbar_m,
            printed: None,
        }
    }

    /// Single-mode `⟨ψ|n̂|ψ⟩`.
    pub fn single_n_mean(&self) -> f64 {
        self.nbar_m / self.norm_sq
    }

    /// Single-mode `⟨ψ|n̂²|ψ⟩`.
    pub fn single_n2_mean(&self) -> f64 {
        self.n2_m / self.norm_sq
    }
}

/// `N̆² = 1/((1+d)(1+d|⟨ψ|0⟩|²))` for a given vacuum overlap.
pub fn normalization_sq_from_overlap(d: usize, vac_overlap_sq: f64) -> f64 {
    let d = d as f64;
    1.0 / ((1.0 + d) * (1.0 + d * vac_overlap_sq))
}

/// N̆² from the per-family closed-form vacuum overlaps `0`, `e^{−α²}`,
/// `sech r₁` and `e^{−β²(1 − tanh r₂)} sech r₂`.
pub fn normalization_sq(spec: &ProbeSpec) -> f64 {
    normalization_sq_from_overlap(spec.d, spec.probe.analytic_moments().vac_overlap_sq)
}

/// Closed-form per-mode moments.
///
/// MNOONS and MECS use their textbook forms (`g = (N−1)/n̄`, `g = 1/N̆²`).
/// MESVS and MESCS use the directly evaluated `⟨â†²â²⟩`; the printed
/// `g⁽²⁾` expressions, which carry a bare `+4` / `+2` where `+4N̆²` /
/// `+2N̆²` is needed, are evaluated alongside and reported in `printed`.
pub fn multimode_moments(spec: &ProbeSpec) -> MultimodeMoments {
    let ns = normalization_sq(spec);
    let d = spec.d;
    match spec.probe {
        Probe::Noon { n } => {
            let n = n as f64;
            let nbar_m = ns * n;
            let g2_m = (n - 1.0) / nbar_m;
            MultimodeMoments {
                norm_sq: ns,
                nbar_m,
                n2_m: nbar_m * nbar_m * g2_m + nbar_m,
                g2_m,
                nbar_total: (d as f64 + 1.0) * nbar_m,
                printed: None,
            }
        }
        Probe::Coherent { alpha } => {
            let nbar_m = ns * alpha * alpha;
            let g2_m = 1.0 / ns;
            MultimodeMoments {
                norm_sq: ns,
                nbar_m,
                n2_m: nbar_m * nbar_m * g2_m + nbar_m,
                g2_m,
                nbar_total: (d as f64 + 1.0) * nbar_m,
                printed: None,
            }
        }
        Probe::SqueezedVacuum { r } => {
            let am = spec.probe.analytic_moments();
            let mut m = MultimodeMoments::from_parts(ns, am.n_mean, am.a2dag_a2, d);
            let printed =
                (ns * (3.0 * (2.0 * r).cosh() - 7.0) * r.cosh().powi(2) + 4.0) / (2.0 * m.nbar_m * m.nbar_m);
            m.printed = Some(deviation(printed, m.g2_m));
            m
        }
        Probe::SqueezedCoherent { beta, r } => {
            let am = spec.probe.analytic_moments();
            let mut m = MultimodeMoments::from_parts(ns, am.n_mean, am.a2dag_a2, d);
            let b2 = beta * beta;
            let z1 = b2 * (2.0 * r).sinh() + (2.0 * b2 - 1.0) * (2.0 * r).cosh();
            let z2 = 0.375 * (4.0 * r).cosh() + b2 * b2 - 2.0 * b2 - 11.0 / 8.0;
            let printed = (ns * (z1 + z2) + 2.0) / (m.nbar_m * m.nbar_m);
            m.printed = Some(deviation(printed, m.g2_m));
            m
        }
    }
}

fn deviation(printed: f64, used: f64) -> PrintedFormDeviation {
    let abs = (printed - used).abs();
    PrintedFormDeviation {
        printed_g2: printed,
        abs_deviation: abs,
        rel_deviation: abs / used.abs(),
    }
}

/// Brute-force per-mode moments from the truncated single-mode state.
pub fn multimode_moments_oracle(spec: &ProbeSpec, tol: f64) -> Result<MultimodeMoments> {
    if tol.is_nan() || tol < 1e-14 {
        return Err(Error::InvalidParameter(format!(
            "oracle tolerance must be >= 1e-14, got {tol}"
        )));
    }
    let state = spec.probe.single_mode().build(tol)?;
    let m = state.moments();
    let ns = normalization_sq_from_overlap(spec.d, m.vac_overlap_sq);
    Ok(MultimodeMoments::from_parts(ns, m.n_mean, m.a2dag_a2, spec.d))
}

/// `N̄ = Σ_m ⟨n̂_m⟩ = (d+1) n̄_m`.
pub fn total_mean_photons(spec: &ProbeSpec) -> f64 {
    multimode_moments(spec).nbar_total
}

const RESIDUAL_TOL: f64 = 1e-12;
const AMPLITUDE_CEILING: f64 = 100.0;
const SQUEEZING_CEILING: f64 = 20.0;

/// Finds the probe parameters of family `kind` whose total mean photon
/// number is `nbar_target`.
pub fn solve_params_for_nbar(
    kind: ProbeKind,
    nbar_target: f64,
    d: usize,
    constraint: MescsConstraint,
) -> Result<ProbeSpec> {
    if !(nbar_target.is_finite() && nbar_target > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target mean photon number must be > 0, got {nbar_target}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let tol = RESIDUAL_TOL * nbar_target.max(1.0);
    let nbar_of = |probe: Probe| total_mean_photons(&ProbeSpec { probe, d });
    let probe = match kind {
        ProbeKind::Mnoons => {
            let n = nbar_target.round();
            if (nbar_target - n).abs() > 1e-12 || n < 1.0 || n > u32::MAX as f64 {
                return Err(Error::NotRepresentable(nbar_target));
            }
            Probe::Noon { n: n as u32 }
        }
        ProbeKind::Mecs => {
            let alpha = bisect_increasing(
                |a| nbar_of(Probe::Coherent { alpha: a }) - nbar_target,
                nbar_target.sqrt().max(0.5),
                0.0,
                AMPLITUDE_CEILING,
                tol,
            )?;
            Probe::Coherent { alpha }
        }
        ProbeKind::Mesvs => {
            let r = bisect_increasing(
                |r| nbar_of(Probe::SqueezedVacuum { r }) - nbar_target,
                1.0,
                0.0,
                SQUEEZING_CEILING,
                tol,
            )?;
            Probe::SqueezedVacuum { r }
        }
        ProbeKind::Mescs => match constraint {
            MescsConstraint::EqualSplit => {
                let r = bisect_increasing(
                    |r| nbar_of(Probe::SqueezedCoherent { beta: r.sinh(), r }) - nbar_target,
                    1.0,
                    0.0,
                    SQUEEZING_CEILING,
                    tol,
                )?;
                Probe::SqueezedCoherent { beta: r.sinh(), r }
            }
            MescsConstraint::FixedR2(r) => {
                let beta = bisect_increasing(
                    |b| nbar_of(Probe::SqueezedCoherent { beta: b, r }) - nbar_target,
                    nbar_target.sqrt().max(0.5),
                    0.0,
                    AMPLITUDE_CEILING,
                    tol,
                )?;
                Probe::SqueezedCoherent { beta, r }
            }
            MescsConstraint::FixedBeta(beta) => {
                let r = bisect_increasing(
                    |r| nbar_of(Probe::SqueezedCoherent { beta, r }) - nbar_target,
                    1.0,
                    0.0,
                    SQUEEZING_CEILING,
                    tol,
                )?;
                Probe::SqueezedCoherent { beta, r }
            }
        },
    };
    ProbeSpec::new(probe, d).map_err(|e| match e {
        // the bracket collapsed onto the parameter floor
        Error::InvalidParameter(msg) => Error::Infeasible(msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rel_diff;

    fn spec(probe: Probe, d: usize) -> ProbeSpec {
        ProbeSpec::new(probe, d).unwrap()
    }

    #[test]
    fn normalizations() {
        assert_eq!(normalization_sq(&spec(Probe::Noon { n: 1 }, 15)), 0.0625);
        let n = normalization_sq(&spec(Probe::Coherent { alpha: 30.0 }, 15));
        assert!((n - 1.0 / 16.0).abs() < 1e-15);
        let n = normalization_sq(&spec(Probe::SqueezedVacuum { r: 1.0 }, 3));
        assert!((n - 1.0 / (4.0 * (1.0 + 3.0 / 1f64.cosh()))).abs() < 1e-15);
    }

    #[test]
    fn normalization_matches_generic_form_with_oracle_overlap() {
        for probe in [
            Probe::Noon { n: 3 },
            Probe::Coherent { alpha: 1.3 },
            Probe::SqueezedVacuum { r: 0.9 },
            Probe::SqueezedCoherent { beta: 0.7, r: 0.4 },
        ] {
            let s = spec(probe, 7);
            let m = probe.single_mode().build(1e-13).unwrap().moments();
            let generic = normalization_sq_from_overlap(7, m.vac_overlap_sq);
            assert!(rel_diff(generic, normalization_sq(&s)) < 1e-10, "{probe:?}");
        }
    }

    #[test]
    fn noon_single_photon_has_no_intramode_correlation() {
        let m = multimode_moments(&spec(Probe::Noon { n: 1 }, 15));
        assert_eq!(m.g2_m, 0.0);
        assert!(m.printed.is_none());
    }

    #[test]
    fn coherent_g2_is_inverse_norm() {
        for (alpha, d) in [(0.5, 1), (1.0, 4), (2.3, 15)] {
            let m = multimode_moments(&spec(Probe::Coherent { alpha }, d));
            let expected = (1.0 + d as f64) * (1.0 + d as f64 * (-alpha * alpha).exp());
            assert!(rel_diff(m.g2_m, expected) < 1e-14);
        }
    }

    #[test]
    fn squeezed_vacuum_g2_corrected_form() {
        let s = spec(Probe::SqueezedVacuum { r: 1.0 }, 15);
        let m = multimode_moments(&s);
        let s2 = 1f64.sinh().powi(2);
        let expected = (3.0 * s2 + 1.0) / (normalization_sq(&s) * s2);
        assert!(rel_diff(m.g2_m, expected) < 1e-14);
        let printed = m.printed.unwrap();
        // printed form differs by 4(1 − N̆²)/(2 n̄²)
        let gap = 4.0 * (1.0 - m.norm_sq) / (2.0 * m.nbar_m * m.nbar_m);
        assert!(rel_diff(printed.printed_g2 - m.g2_m, gap) < 1e-10);
    }

    #[test]
    fn squeezed_coherent_printed_form_offsets_by_two() {
        let s = spec(Probe::SqueezedCoherent { beta: 1.1, r: 0.6 }, 5);
        let m = multimode_moments(&s);
        let gap = 2.0 * (1.0 - m.norm_sq) / (m.nbar_m * m.nbar_m);
        let p = m.printed.unwrap();
        assert!(rel_diff(p.printed_g2 - m.g2_m, gap) < 1e-10);
    }

    #[test]
    fn total_photons_closed_forms() {
        for n in 1..8 {
            let t = total_mean_photons(&spec(Probe::Noon { n }, 9));
            assert!((t - n as f64).abs() < 1e-13);
        }
        let (alpha, d) = (1.7f64, 6usize);
        let t = total_mean_photons(&spec(Probe::Coherent { alpha }, d));
        let expected = alpha * alpha / (1.0 + d as f64 * (-alpha * alpha).exp());
        assert!(rel_diff(t, expected) < 1e-14);
        let tiny = total_mean_photons(&spec(Probe::SqueezedVacuum { r: 1e-6 }, 3));
        assert!(tiny < 1e-11);
    }

    #[test]
    fn oracle_multimode_examples() {
        let m = multimode_moments_oracle(&spec(Probe::Noon { n: 3 }, 2), 1e-12).unwrap();
        assert!((m.nbar_m - 1.0).abs() < 1e-15);
        assert!((m.g2_m - 2.0).abs() < 1e-15);

        let s = spec(Probe::Coherent { alpha: 1.0 }, 1);
        let o = multimode_moments_oracle(&s, 1e-12).unwrap();
        let c = multimode_moments(&s);
        assert!(rel_diff(o.nbar_m, c.nbar_m) < 1e-10);
        assert!(rel_diff(o.g2_m, c.g2_m) < 1e-10);

        let sc = multimode_moments_oracle(&spec(Probe::SqueezedCoherent { beta: 1.0, r: 0.0 }, 4), 1e-12).unwrap();
        let co = multimode_moments_oracle(&spec(Probe::Coherent { alpha: 1.0 }, 4), 1e-12).unwrap();
        assert!(rel_diff(sc.nbar_m, co.nbar_m) < 1e-14);
        assert!(rel_diff(sc.g2_m, co.g2_m) < 1e-14);

        assert!(multimode_moments_oracle(&s, 1e-15).is_err());
    }

    #[test]
    fn solver_examples() {
        let s = solve_params_for_nbar(ProbeKind::Mnoons, 5.0, 15, MescsConstraint::EqualSplit).unwrap();
        assert_eq!(s.probe, Probe::Noon { n: 5 });
        assert_eq!(
            solve_params_for_nbar(ProbeKind::Mnoons, 2.5, 15, MescsConstraint::EqualSplit)
                .unwrap_err()
                .code(),
            "not_representable"
        );

        let s = solve_params_for_nbar(ProbeKind::Mecs, 5.0, 15, MescsConstraint::EqualSplit).unwrap();
        let Probe::Coherent { alpha } = s.probe else { panic!() };
        let a2 = alpha * alpha;
        assert!((a2 - 5.0 * (1.0 + 15.0 * (-a2).exp())).abs() < 1e-10);
        assert!((alpha - 2.3139).abs() < 1e-3);

        let s = solve_params_for_nbar(ProbeKind::Mesvs, 5.0, 15, MescsConstraint::EqualSplit).unwrap();
        let Probe::SqueezedVacuum { r } = s.probe else { panic!() };
        assert!((r.sinh().powi(2) - 5.0 * (1.0 + 15.0 / r.cosh())).abs() < 1e-9);
        assert!((total_mean_photons(&s) - 5.0).abs() < 1e-10);
    }

    #[test]
    fn mescs_constraints() {
        let s = solve_params_for_nbar(ProbeKind::Mescs, 4.0, 5, MescsConstraint::EqualSplit).unwrap();
        let Probe::SqueezedCoherent { beta, r } = s.probe else { panic!() };
        assert!((beta - r.sinh()).abs() < 1e-15);
        assert!((total_mean_photons(&s) - 4.0).abs() < 1e-10);

        let s = solve_params_for_nbar(ProbeKind::Mescs, 4.0, 5, MescsConstraint::FixedR2(0.5)).unwrap();
        let Probe::SqueezedCoherent { r, .. } = s.probe else { panic!() };
        assert_eq!(r, 0.5);
        assert!((total_mean_photons(&s) - 4.0).abs() < 1e-10);

        let s = solve_params_for_nbar(ProbeKind::Mescs, 4.0, 5, MescsConstraint::FixedBeta(1.0)).unwrap();
        let Probe::SqueezedCoherent { beta, .. } = s.probe else { panic!() };
        assert_eq!(beta, 1.0);
        assert!((total_mean_photons(&s) - 4.0).abs() < 1e-10);

        // β = 3 alone already carries more than 0.1 photons in total
        let err = solve_params_for_nbar(ProbeKind::Mescs, 0.1, 5, MescsConstraint::FixedBeta(3.0)).unwrap_err();
        assert_eq!(err.code(), "infeasible");
    }

    #[test]
    fn constraint_parsing() {
        assert_eq!("equal_split".parse::<MescsConstraint>().unwrap(), MescsConstraint::EqualSplit);
        assert_eq!("fixed_r2=0.5".parse::<MescsConstraint>().unwrap(), MescsConstraint::FixedR2(0.5));
        assert_eq!("FIXED_BETA = 2".parse::<MescsConstraint>().unwrap(), MescsConstraint::FixedBeta(2.0));
        for bad in ["", "fixed_r2", "fixed_r2=-1", "fixed_beta=nan", "equal_split=3", "other"] {
            assert!(bad.parse::<MescsConstraint>().is_err(), "{bad}");
        }
        for c in [MescsConstraint::EqualSplit, MescsConstraint::FixedR2(0.25)] {
            assert_eq!(c.to_string().parse::<MescsConstraint>().unwrap(), c);
        }
    }

    #[test]
    fn probe_list_parsing() {
        assert_eq!(parse_probe_list("all").unwrap(), ProbeKind::ALL.to_vec());
        assert_eq!(
            parse_probe_list("mescs, MNOONS,mescs").unwrap(),
            vec![ProbeKind::Mnoons, ProbeKind::Mescs]
        );
        assert!(parse_probe_list("").is_err());
        assert!(parse_probe_list("ghz").is_err());
    }

    #[test]
    fn probe_validation() {
        assert!(ProbeSpec::new(Probe::Noon { n: 0 }, 3).is_err());
        assert!(ProbeSpec::new(Probe::Noon { n: 1 }, 0).is_err());
        assert!(ProbeSpec::new(Probe::SqueezedVacuum { r: 0.0 }, 3).is_err());
        assert!(ProbeSpec::new(Probe::Coherent { alpha: -1.0 }, 3).is_err());
        assert!(ProbeSpec::new(Probe::SqueezedCoherent { beta: 0.0, r: 0.0 }, 3).is_err());
        assert!(ProbeSpec::new(Probe::SqueezedCoherent { beta: 0.0, r: 0.3 }, 3).is_ok());
    }
}
