//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every criterion is evaluated and reported even when an
//! earlier one fails.

use std::process::{Command, ExitCode};

use oam_qcrb::kraus::{completeness_deviation, KrausFamily};
use oam_qcrb::loss::{
    cq_trace_inverse_exact, cq_trace_inverse_large_d, delta_argmax_numeric, delta_opt, qcrb_lossy, robustness,
    LossConfig,
};
use oam_qcrb::numeric::rel_diff;
use oam_qcrb::probe::{
    multimode_moments, multimode_moments_oracle, solve_params_for_nbar, total_mean_photons, MescsConstraint,
    ProbeKind, ProbeSpec,
};
use oam_qcrb::qfim::{dense_trace_inverse, qcrb_ideal, qfim, qfim_dense, SensingConfig};

use ProbeKind::{Mecs, Mescs, Mesvs, Mnoons};

const ORACLE_TOL: f64 = 1e-12;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
    /// Informational notes that never affect the verdict.
    findings: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            findings: Vec::new(),
        }
    }
}

fn probe(kind: ProbeKind, nbar: f64, d: usize) -> ProbeSpec {
    solve_params_for_nbar(kind, nbar, d, MescsConstraint::EqualSplit)
        .unwrap_or_else(|e| panic!("{kind} nbar={nbar} d={d}: {e}"))
}

fn cfg(l: u32, d: usize) -> SensingConfig {
    SensingConfig::new(l, d).unwrap()
}

fn ideal(kind: ProbeKind, nbar: f64, d: usize, l: u32) -> f64 {
    qcrb_ideal(&probe(kind, nbar, d), &cfg(l, d)).unwrap()
}

fn lossy(kind: ProbeKind, nbar: f64, d: usize, l: u32, eta: f64) -> f64 {
    qcrb_lossy(&probe(kind, nbar, d), &cfg(l, d), eta).unwrap()
}

fn gap(kind: ProbeKind, nbar: f64, d: usize, l: u32, eta: f64) -> f64 {
    robustness(&probe(kind, nbar, d), &cfg(l, d), eta).unwrap().value
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn c01_oracle_moments() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_printed = f64::INFINITY;
    let mut failures = Vec::new();
    for d in [1, 5, 15] {
        for n in 1..=10 {
            let nbar = n as f64;
            for kind in [Mnoons, Mecs, Mesvs] {
                let s = probe(kind, nbar, d);
                let closed = multimode_moments(&s);
                let oracle = match multimode_moments_oracle(&s, ORACLE_TOL) {
                    Ok(o) => o,
                    Err(e) => {
                        failures.push(format!("{kind} nbar={nbar} d={d}: {e}"));
                        continue;
                    }
                };
                let dev = rel_diff(closed.nbar_m, oracle.nbar_m).max(rel_diff(closed.g2_m, oracle.g2_m));
                worst = worst.max(dev);
                if dev > 1e-9 {
                    failures.push(format!("{kind} nbar={nbar} d={d}: {dev:e}"));
                }
                if kind == Mesvs {
                    let p = closed.printed.expect("squeezed-vacuum probes carry the printed form");
                    worst_printed = worst_printed.min(p.rel_deviation);
                }
            }
        }
    }
    let mut o = Outcome::new(
        failures.is_empty(),
        format!("worst closed-form vs oracle {worst:.2e} (<= 1e-9); {}", failures.join(", ")),
    );
    o.findings.push(format!(
        "printed MESVS g2 deviates from the oracle by at least {worst_printed:.3e} relative (documented discrepancy)"
    ));
    o
}

fn c02_dense_vs_structured() -> Outcome {
    let mut worst = 0.0f64;
    for d in [1, 2, 5, 15, 50, 200] {
        for kind in ProbeKind::ALL {
            let s = probe(kind, 5.0, d);
            let c = cfg(2, d);
            let structured = qfim(&s, &c).unwrap().trace_inverse().unwrap();
            let dense = dense_trace_inverse(&qfim_dense(&s, &c).unwrap()).unwrap();
            worst = worst.max(rel_diff(structured, dense));
        }
    }
    Outcome::new(worst <= 1e-10, format!("worst relative deviation {worst:.2e} (<= 1e-10)"))
}

fn c03_ideal_identity() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for d in [1, 2, 5, 15, 50, 200] {
        for n in 1..=10 {
            for kind in ProbeKind::ALL {
                let s = probe(kind, n as f64, d);
                for l in [1, 2, 5, 10] {
                    let c = cfg(l, d);
                    let tr = qfim(&s, &c).unwrap().trace_inverse().unwrap();
                    worst = worst.max(rel_diff(qcrb_ideal(&s, &c).unwrap(), tr));
                    points += 1;
                }
            }
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("{points} grid points, worst relative deviation {worst:.2e} (<= 1e-12)"),
    )
}

fn c04_lossless_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 5, 15] {
        for kind in ProbeKind::ALL {
            let s = probe(kind, 5.0, d);
            let c = cfg(2, d);
            let ideal = qcrb_ideal(&s, &c).unwrap();
            for delta in [-1.0, -0.5, 0.0] {
                let v = cq_trace_inverse_exact(&s, &c, &LossConfig::new(1.0, delta).unwrap()).unwrap();
                worst = worst.max(rel_diff(v, ideal));
            }
        }
    }
    Outcome::new(worst <= 1e-10, format!("worst relative deviation {worst:.2e} (<= 1e-10)"))
}

fn c05_variational_optimum() -> Outcome {
    let (d, l) = (15, 2);
    let mut failures = Vec::new();
    let mut worst_delta = 0.0f64;
    for eta in [0.3, 0.5, 0.7, 0.9] {
        for kind in ProbeKind::ALL {
            let s = probe(kind, 5.0, d);
            let c = cfg(l, d);
            let closed = delta_opt(&s, eta).unwrap();
            let (num, val) = delta_argmax_numeric(&s, &c, eta, -1.0, 1.0, 1e-7).unwrap();
            let at_closed = cq_trace_inverse_large_d(&s, &c, &LossConfig::new(eta, closed).unwrap()).unwrap();
            let dd = (num - closed).abs();
            let dv = rel_diff(val, at_closed);
            worst_delta = worst_delta.max(dd);
            if dd > 1e-5 || dv > 1e-9 {
                failures.push(format!(
                    "{kind} eta={eta}: closed {closed:.6} vs argmax on [-1,1] {num:.6}"
                ));
            }
        }
    }
    let mut o = Outcome::new(
        failures.is_empty(),
        format!("worst |delta gap| {worst_delta:.2e} (<= 1e-5); {}", failures.join("; ")),
    );
    if !o.pass {
        o.findings.push(
            "the closed-form optimum is >= 0 and exceeds 1 for these probes at high eta, \
             so the argmax over [-1,1] sits on the boundary delta = 1"
                .into(),
        );
    }
    o
}

fn c06_kraus_completeness() -> Outcome {
    let family = KrausFamily {
        cutoff: 4,
        loss: LossConfig::new(0.5, 0.0).unwrap(),
        l: 2,
        theta: 0.37,
    };
    let dev = completeness_deviation(&family);
    Outcome::new(dev <= 1e-12, format!("max elementwise deviation {dev:.2e} (<= 1e-12)"))
}

fn c07_nbar_orderings() -> Outcome {
    let (d, l) = (15, 2);
    let mut failures = Vec::new();
    let mut findings = Vec::new();
    for n in 2..=10 {
        let nbar = n as f64;
        let q = |k| ideal(k, nbar, d, l);
        let g = |k| multimode_moments(&probe(k, nbar, d)).g2_m;
        if !(q(Mesvs) < q(Mecs) && q(Mecs) < q(Mnoons)) {
            failures.push(format!("ideal order at nbar={nbar}"));
        }
        if !(g(Mesvs) > g(Mecs) && g(Mecs) > g(Mnoons)) {
            failures.push(format!("g2 order at nbar={nbar}"));
        }
        if !(q(Mesvs) < q(Mescs) && q(Mescs) < q(Mecs)) {
            findings.push(format!("MESCS ideal bound not between MESVS and MECS at nbar={nbar}"));
        }
        if !(g(Mesvs) > g(Mescs) && g(Mescs) > g(Mecs)) {
            findings.push(format!("MESCS g2 not between MESVS and MECS at nbar={nbar}"));
        }
    }
    if findings.is_empty() {
        findings.push("MESCS (equal split) lies between MESVS and MECS at every nbar".into());
    }
    let mut o = Outcome::new(
        failures.is_empty(),
        format!("nbar = 2..10, d = 15, l = 2; {}", failures.join(", ")),
    );
    o.findings = findings;
    o
}

fn c08_d_and_l_dependence() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for kind in ProbeKind::ALL {
        let by_d: Vec<f64> = (2..=30).map(|d| ideal(kind, 5.0, d, 2)).collect();
        if !strictly_increasing(&by_d) {
            failures.push(format!("{kind} not increasing in d"));
        }
        let scaled: Vec<f64> = (1..=10u32).map(|l| ideal(kind, 5.0, 15, l) * (l * l) as f64).collect();
        for v in &scaled {
            worst = worst.max(rel_diff(*v, scaled[0]));
        }
    }
    Outcome::new(
        failures.is_empty() && worst <= 1e-12,
        format!("l^2 * bound spread {worst:.2e} (<= 1e-12); {}", failures.join(", ")),
    )
}

fn c09_eta_dependence() -> Outcome {
    let etas: Vec<f64> = (5..=100).map(|i| i as f64 / 100.0).collect();
    let mut failures = Vec::new();
    for kind in ProbeKind::ALL {
        let v: Vec<f64> = etas.iter().map(|&e| lossy(kind, 5.0, 15, 2, e)).collect();
        if !strictly_decreasing(&v) {
            failures.push(format!("{kind} not decreasing in eta"));
        }
    }
    for &eta in &etas {
        let m = lossy(Mesvs, 5.0, 15, 2, eta);
        if [Mnoons, Mecs, Mescs].iter().any(|&k| lossy(k, 5.0, 15, 2, eta) <= m) {
            failures.push(format!("MESVS not lowest at eta={eta}"));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("eta = 0.05..1 step 0.01, nbar = 5, d = 15, l = 2; {}", failures.join(", ")),
    )
}

fn c10_gap_behavior() -> Outcome {
    let by_d: Vec<f64> = (5..=30).map(|d| gap(Mesvs, 5.0, d, 2, 0.7)).collect();
    let by_l: Vec<f64> = (2..=10).map(|l| gap(Mesvs, 5.0, 15, l, 0.7)).collect();
    let up_in_d = strictly_increasing(&by_d);
    let down_in_l = strictly_decreasing(&by_l);
    let mut o = Outcome::new(
        up_in_d && down_in_l,
        format!(
            "MESVS R: d=5 {:.4e} -> d=30 {:.4e} (increasing: {up_in_d}); l=2 {:.4e} -> l=10 {:.4e} (decreasing: {down_in_l})",
            by_d[0],
            by_d[by_d.len() - 1],
            by_l[0],
            by_l[by_l.len() - 1]
        ),
    );
    let sign = if down_in_l { "negative" } else { "not negative" };
    o.findings.push(format!("empirical dR/dl is {sign}; R scales as 1/l^2"));
    o
}

fn c11_robustness_ordering() -> Outcome {
    let r = |k, l| gap(k, 5.0, 10, l, 0.7);
    let ordered = r(Mnoons, 2) < r(Mecs, 2) && r(Mecs, 2) < r(Mescs, 2) && r(Mescs, 2) < r(Mesvs, 2);
    let spread: Vec<f64> = (2..=10).map(|l| r(Mesvs, l) - r(Mnoons, l)).collect();
    let shrinking = strictly_decreasing(&spread);
    Outcome::new(
        ordered && shrinking,
        format!(
            "R at l=2: MNOONS {:.4e}, MECS {:.4e}, MESCS {:.4e}, MESVS {:.4e} (ordered: {ordered}); MESVS-MNOONS spread shrinking: {shrinking}",
            r(Mnoons, 2),
            r(Mecs, 2),
            r(Mescs, 2),
            r(Mesvs, 2)
        ),
    )
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_oam-qcrb"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c12_round_trip_and_determinism() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    let mut infeasible = 0;
    let mut errors = Vec::new();
    let constraints = [
        MescsConstraint::EqualSplit,
        MescsConstraint::FixedR2(0.3),
        MescsConstraint::FixedBeta(0.5),
    ];
    for d in [1, 2, 5, 15, 50, 200] {
        for i in 2..=20 {
            let nbar = i as f64 / 2.0;
            for kind in ProbeKind::ALL {
                if kind == Mnoons && nbar.fract() != 0.0 {
                    continue;
                }
                let cs: &[MescsConstraint] = if kind == Mescs { &constraints } else { &constraints[..1] };
                for &c in cs {
                    match solve_params_for_nbar(kind, nbar, d, c) {
                        Ok(s) => {
                            worst = worst.max(rel_diff(total_mean_photons(&s), nbar));
                            points += 1;
                        }
                        // a fixed component alone can exceed a small target
                        Err(e) if e.code() == "infeasible" => infeasible += 1,
                        Err(e) => errors.push(format!("{kind} nbar={nbar} d={d} {c}: {e}")),
                    }
                }
            }
        }
    }
    let runs = [
        vec!["figure", "fig5a"],
        vec!["figure", "fig7b", "--format", "jsonl"],
        vec!["sweep", "--axis", "d", "--range", "1:20:20", "--outputs", "ideal,lossy,robustness,g2"],
    ];
    let identical = runs.iter().all(|a| run_cli(a) == run_cli(a));
    Outcome::new(
        worst <= 1e-10 && identical && errors.is_empty(),
        format!(
            "{points} solves ({infeasible} infeasible targets refused), worst round-trip {worst:.2e} (<= 1e-10); \
             repeated CLI output byte-identical: {identical}; {}",
            errors.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 12] = [
        ("oracle equivalence of per-mode moments", c01_oracle_moments),
        ("structured vs dense QFIM inverse trace", c02_dense_vs_structured),
        ("ideal bound equals structured trace", c03_ideal_identity),
        ("lossless consistency of the variational bound", c04_lossless_consistency),
        ("closed-form delta_opt vs numeric argmax on [-1, 1]", c05_variational_optimum),
        ("Kraus completeness at cutoff 4, eta = 0.5", c06_kraus_completeness),
        ("ideal bound and g2 orderings in nbar", c07_nbar_orderings),
        ("ideal bound vs d and l", c08_d_and_l_dependence),
        ("lossy bound vs eta", c09_eta_dependence),
        ("MESVS gap vs d and l", c10_gap_behavior),
        ("robustness ordering and convergence in l", c11_robustness_ordering),
        ("solver round trip and CLI determinism", c12_round_trip_and_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2}: {name}: {}", i + 1, o.detail.trim_end_matches([';', ' ']));
        for f in &o.findings {
            println!("     finding: {f}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
