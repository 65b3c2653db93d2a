//! Cross-check suite: every closed form against an independent route,
//! summarized as a machine-readable report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::DEFAULT_TOL;
use crate::kraus::{completeness_deviation, KrausFamily};
use crate::loss::{
    channel_coefficients, cq_matrix, cq_trace_inverse_exact, cq_trace_inverse_large_d, delta_argmax_numeric,
    delta_opt, qcrb_lossy, qcrb_lossy_per_state, LossConfig,
};
use crate::numeric::rel_diff;
use crate::probe::{
    multimode_moments, multimode_moments_oracle, solve_params_for_nbar, total_mean_photons, MescsConstraint,
    ProbeKind, ProbeSpec,
};
use crate::qfim::{
    dense_trace_inverse, qcrb_ideal, qcrb_ideal_per_state, qfim, qfim_dense, SensingConfig, DENSE_MAX_DIM,
};

/// Grids and tolerance for a verification run. `tol` replaces every
/// family's default threshold when set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyProfile {
    pub tol: Option<f64>,
    pub nbar_grid: Vec<f64>,
    pub d_grid: Vec<usize>,
    pub l_grid: Vec<u32>,
    pub eta_grid: Vec<f64>,
    pub mescs_constraint: MescsConstraint,
}

impl Default for VerifyProfile {
    fn default() -> Self {
        Self {
            tol: None,
            nbar_grid: (1..=10).map(f64::from).collect(),
            d_grid: vec![1, 2, 5, 15, 50, 200],
            l_grid: vec![2],
            eta_grid: vec![0.3, 0.5, 0.7, 0.9],
            mescs_constraint: MescsConstraint::EqualSplit,
        }
    }
}

impl VerifyProfile {
    pub fn empty() -> Self {
        Self {
            nbar_grid: Vec::new(),
            d_grid: Vec::new(),
            l_grid: Vec::new(),
            eta_grid: Vec::new(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Known, explained deviation; never counts as a failure.
    Documented,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub status: Status,
    pub checks: usize,
    /// Cases outside the reach of the reference route (e.g. an oracle
    /// cutoff above the ceiling); they neither pass nor fail.
    pub skipped: usize,
    pub threshold: f64,
    pub worst_deviation: f64,
    pub worst_case: String,
    /// Up to a handful of failing cases.
    pub failures: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tol_override: Option<f64>,
    pub passed: bool,
    pub families: Vec<FamilyReport>,
}

const MAX_LISTED_FAILURES: usize = 8;

struct Family {
    name: String,
    threshold: f64,
    checks: usize,
    skipped: usize,
    worst: f64,
    worst_case: String,
    failures: Vec<String>,
    documented: Option<String>,
}

impl Family {
    fn new(name: &str, default_threshold: f64, tol: Option<f64>) -> Self {
        Self {
            name: name.to_string(),
            threshold: tol.unwrap_or(default_threshold),
            checks: 0,
            skipped: 0,
            worst: 0.0,
            worst_case: String::new(),
            failures: Vec::new(),
            documented: None,
        }
    }

    fn documented(name: &str, note: &str) -> Self {
        let mut f = Self::new(name, 0.0, None);
        f.documented = Some(note.to_string());
        f
    }

    fn record(&mut self, case: String, deviation: f64) {
        self.checks += 1;
        let bad = deviation.is_nan() || deviation > self.threshold;
        if deviation > self.worst || deviation.is_nan() || self.worst_case.is_empty() {
            self.worst = if deviation.is_nan() { f64::INFINITY } else { deviation.max(self.worst) };
            self.worst_case = case.clone();
        }
        if bad && self.documented.is_none() && self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(format!("{case}: {deviation:e}"));
        }
    }

    fn error(&mut self, case: String, err: Error) {
        self.checks += 1;
        self.worst = f64::INFINITY;
        self.worst_case = case.clone();
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(format!("{case}: {}", err.code()));
        }
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn finish(self) -> Option<FamilyReport> {
        if self.checks + self.skipped == 0 {
            return None;
        }
        let status = if self.documented.is_some() {
            Status::Documented
        } else if self.failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        };
        Some(FamilyReport {
            family: self.name,
            status,
            checks: self.checks,
            skipped: self.skipped,
            threshold: self.threshold,
            worst_deviation: self.worst,
            worst_case: self.worst_case,
            failures: self.failures,
            note: self.documented,
        })
    }
}

struct Site {
    kind: ProbeKind,
    nbar: f64,
    spec: ProbeSpec,
}

fn label(kind: ProbeKind, nbar: f64, d: usize) -> String {
    format!("{kind} nbar={nbar} d={d}")
}

/// Runs every check family over the profile grid. Families with no grid
/// points are left out, so an empty profile yields an empty report.
pub fn verify(profile: &VerifyProfile) -> VerifyReport {
    let tol = profile.tol;
    let oracle_tol = tol.map_or(DEFAULT_TOL, |t| t.clamp(1e-14, DEFAULT_TOL));

    let mut solver = Family::new("solver_round_trip", 1e-10, tol);
    let mut sites = Vec::new();
    for &d in &profile.d_grid {
        for &nbar in &profile.nbar_grid {
            for kind in ProbeKind::ALL {
                if kind == ProbeKind::Mnoons && nbar.fract() != 0.0 {
                    continue;
                }
                let case = label(kind, nbar, d);
                match solve_params_for_nbar(kind, nbar, d, profile.mescs_constraint) {
                    Ok(spec) => {
                        solver.record(case, rel_diff(total_mean_photons(&spec), nbar));
                        sites.push(Site { kind, nbar, spec });
                    }
                    Err(e) => solver.error(case, e),
                }
            }
        }
    }

    let mut oracle = Family::new("oracle_vs_closed_form", 1e-9, tol);
    let mut printed_mesvs = Family::documented(
        "printed_g2_discrepancy_mesvs",
        "printed squeezed-vacuum g2 carries +4 where the normalized moment needs +4*N^2; the corrected form is used",
    );
    let mut printed_mescs = Family::documented(
        "printed_g2_discrepancy_mescs",
        "printed squeezed-coherent g2 carries +2 where the normalized moment needs +2*N^2; the corrected form is used",
    );
    for s in &sites {
        let case = label(s.kind, s.nbar, s.spec.d);
        let closed = multimode_moments(&s.spec);
        match multimode_moments_oracle(&s.spec, oracle_tol) {
            Ok(o) => oracle.record(
                case.clone(),
                rel_diff(closed.nbar_m, o.nbar_m).max(rel_diff(closed.g2_m, o.g2_m)),
            ),
            Err(Error::InfeasibleTolerance { .. }) => oracle.skip(),
            Err(e) => oracle.error(case.clone(), e),
        }
        if let Some(p) = closed.printed {
            match s.kind {
                ProbeKind::Mesvs => printed_mesvs.record(case, p.rel_deviation),
                _ => printed_mescs.record(case, p.rel_deviation),
            }
        }
    }

    let mut dense = Family::new("dense_vs_structured", 1e-10, tol);
    let mut identity = Family::new("ideal_bound_identity", 1e-12, tol);
    let mut lossless = Family::new("lossless_consistency", 1e-10, tol);
    let mut dense_cq = Family::new("dense_cq_vs_structured", 1e-10, tol);
    let mut argmax = Family::new("delta_opt_vs_argmax", 1e-5, tol);
    let mut grid_opt = Family::new("variational_optimality_grid", 0.0, None);
    let mut reconstruction = Family::new("lossy_reconstruction", 1e-10, tol);
    let mut bracket = Family::documented(
        "delta_opt_anchor_bracket",
        "the closed-form optimum is >= 0 because <n^2> >= <n>, so it sits above the anchor interval [-1, 0] whenever <n^2> > <n>; the value is reported unclamped and worst_deviation is its largest distance outside [-1, 0]",
    );
    for s in &sites {
        for &l in &profile.l_grid {
            let cfg = match SensingConfig::new(l, s.spec.d) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let case = format!("{} l={l}", label(s.kind, s.nbar, s.spec.d));
            let ideal = match qcrb_ideal(&s.spec, &cfg) {
                Ok(v) => v,
                Err(e) => {
                    identity.error(case, e);
                    continue;
                }
            };

            match qfim(&s.spec, &cfg).and_then(|f| f.trace_inverse()) {
                Ok(tr) => {
                    let per_state = qcrb_ideal_per_state(&s.spec, &cfg).map_or(f64::INFINITY, |v| rel_diff(v, ideal));
                    identity.record(case.clone(), rel_diff(tr, ideal).max(per_state));
                    if s.spec.d <= DENSE_MAX_DIM {
                        match qfim_dense(&s.spec, &cfg).and_then(|m| dense_trace_inverse(&m)) {
                            Ok(v) => dense.record(case.clone(), rel_diff(v, tr)),
                            Err(e) => dense.error(case.clone(), e),
                        }
                    }
                }
                Err(e) => identity.error(case.clone(), e),
            }

            for delta in [-1.0, -0.5, 0.0] {
                let c = format!("{case} delta={delta}");
                match cq_trace_inverse_exact(&s.spec, &cfg, &LossConfig { eta: 1.0, delta }) {
                    Ok(v) => lossless.record(c, rel_diff(v, ideal)),
                    Err(e) => lossless.error(c, e),
                }
            }

            for &eta in &profile.eta_grid {
                let c = format!("{case} eta={eta}");
                let opt = match delta_opt(&s.spec, eta) {
                    Ok(v) => v,
                    Err(e) => {
                        argmax.error(c, e);
                        continue;
                    }
                };
                bracket.record(c.clone(), opt.max(-1.0 - opt).max(0.0));

                let loss = LossConfig { eta, delta: 0.3 };
                if s.spec.d <= DENSE_MAX_DIM {
                    let r = cq_matrix(&s.spec, &cfg, &loss).and_then(|m| {
                        let dense = dense_trace_inverse(&m.to_dense()?)?;
                        Ok(rel_diff(dense, cq_trace_inverse_exact(&s.spec, &cfg, &loss)?))
                    });
                    match r {
                        Ok(v) => dense_cq.record(c.clone(), v),
                        Err(e) => dense_cq.error(c.clone(), e),
                    }
                }

                if s.spec.d < 2 {
                    continue;
                }
                let at = |delta: f64| cq_trace_inverse_large_d(&s.spec, &cfg, &LossConfig { eta, delta });
                // both physical anchors and the closed-form optimum inside
                let hi = opt.max(0.0) + 1.0;
                match delta_argmax_numeric(&s.spec, &cfg, eta, -1.0, hi, 1e-9) {
                    Ok((num, _)) => argmax.record(c.clone(), (num - opt).abs()),
                    Err(e) => argmax.error(c.clone(), e),
                }
                if let Ok(best) = at(opt) {
                    let worst_excess = (0..=2000)
                        .map(|i| -1.0 + i as f64 * 1e-3)
                        .filter_map(|delta| at(delta).ok())
                        .map(|v| (v - best) / best)
                        .fold(0.0f64, f64::max);
                    grid_opt.record(c.clone(), worst_excess.max(0.0));
                }
                match (qcrb_lossy(&s.spec, &cfg, eta), at(opt), qcrb_lossy_per_state(&s.spec, &cfg, eta)) {
                    (Ok(a), Ok(b), Ok(p)) => reconstruction.record(c, rel_diff(a, b).max(rel_diff(a, p))),
                    (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => reconstruction.error(c, e),
                }
            }
        }
    }

    let mut kraus = Family::new("kraus_completeness", 1e-12, tol);
    let mut generators = Family::new("kraus_reduced_generators", 1e-11, tol);
    for &eta in &profile.eta_grid {
        for delta in [-1.0, 0.0, 0.4] {
            let loss = match LossConfig::new(eta, delta) {
                Ok(l) => l,
                Err(e) => {
                    kraus.error(format!("eta={eta}"), e);
                    continue;
                }
            };
            let fam = KrausFamily { cutoff: 4, loss, l: 2, theta: 0.37 };
            let case = format!("cutoff=4 eta={eta} delta={delta}");
            kraus.record(case.clone(), completeness_deviation(&fam));
            let c = channel_coefficients(&loss);
            let g = 2.0 * fam.l as f64;
            let (gamma, lambda) = (fam.gamma_generator(), fam.lambda_generator());
            let mut worst = 0.0f64;
            for j in 0..=fam.cutoff {
                for m in 0..=fam.cutoff {
                    let n = j as f64;
                    let (eg, el) = if j == m {
                        (g * c.chi * n, g * g * (c.chi * c.chi * n * n + c.gamma * n))
                    } else {
                        (0.0, 0.0)
                    };
                    worst = worst.max((gamma[(j, m)].re - eg).abs() + gamma[(j, m)].im.abs());
                    worst = worst.max((lambda[(j, m)].re - el).abs() + lambda[(j, m)].im.abs());
                }
            }
            generators.record(case, worst);
        }
    }

    let families: Vec<FamilyReport> = [
        oracle,
        printed_mesvs,
        printed_mescs,
        dense,
        identity,
        lossless,
        dense_cq,
        argmax,
        grid_opt,
        bracket,
        reconstruction,
        kraus,
        generators,
        solver,
    ]
    .into_iter()
    .filter_map(Family::finish)
    .collect();
    VerifyReport {
        tol_override: tol,
        passed: families.iter().all(|f| f.status != Status::Fail),
        families,
    }
}

pub fn report_json(report: &VerifyReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))
}
