//! Parameter sweeps, figure presets, single-point reports and the CSV/JSONL
//! emitters.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::loss::{cq_trace_inverse_exact, cq_trace_inverse_large_d, delta_opt, qcrb_lossy, robustness, LossConfig};
use crate::numeric::rel_diff;
use crate::probe::{multimode_moments, multimode_moments_oracle, solve_params_for_nbar, MescsConstraint, Probe, ProbeKind, ProbeSpec};
use crate::qfim::{qcrb_ideal, qfim, SensingConfig};

/// Default lower end of an `η` sweep; the lossy bound diverges as `η → 0`.
pub const DEFAULT_ETA_MIN: f64 = 0.05;

const INTEGER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    NbarTotal,
    D,
    L,
    Eta,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::NbarTotal => "nbar_total",
            Axis::D => "d",
            Axis::L => "l",
            Axis::Eta => "eta",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nbar_total" | "nbar" => Ok(Axis::NbarTotal),
            "d" => Ok(Axis::D),
            "l" => Ok(Axis::L),
            "eta" => Ok(Axis::Eta),
            other => Err(Error::Config(format!("unknown axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Ideal,
    Lossy,
    Robustness,
    G2,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::Ideal, Quantity::Lossy, Quantity::Robustness, Quantity::G2];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Ideal => "ideal",
            Quantity::Lossy => "lossy",
            Quantity::Robustness => "robustness",
            Quantity::G2 => "g2",
        }
    }

    fn needs_eta(self) -> bool {
        matches!(self, Quantity::Lossy | Quantity::Robustness)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ideal" => Ok(Quantity::Ideal),
            "lossy" => Ok(Quantity::Lossy),
            "robustness" | "r" => Ok(Quantity::Robustness),
            "g2" => Ok(Quantity::G2),
            other => Err(Error::Config(format!("unknown quantity '{other}'"))),
        }
    }
}

/// Comma-separated quantities, deduplicated, in canonical order.
pub fn parse_quantity_list(s: &str) -> Result<Vec<Quantity>> {
    let mut out = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(Quantity::from_str)
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(Error::Config("empty quantity list".into()));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Inclusive linear range `start:stop:steps`; a bare number is a
/// single-point range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Upper bound on points per sweep axis.
pub const MAX_STEPS: usize = 100_000;

impl AxisRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err(Error::Config("range bounds must be finite".into()));
        }
        if steps == 0 {
            return Err(Error::Config("range needs at least one step".into()));
        }
        if steps > MAX_STEPS {
            return Err(Error::Config(format!("at most {MAX_STEPS} steps per range")));
        }
        if steps == 1 && start != stop {
            return Err(Error::Config("a one-step range needs start == stop".into()));
        }
        Ok(Self { start, stop, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + span * (i as f64 / last)
                }
            })
            .collect()
    }
}

impl FromStr for AxisRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad range bound '{t}'")))
        };
        match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                AxisRange::new(v, v, 1)
            }
            [a, b, n] => {
                let steps = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad step count '{n}'")))?;
                AxisRange::new(num(a)?, num(b)?, steps)
            }
            _ => Err(Error::Config(format!("range must be 'start:stop:steps', got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub nbar_total: f64,
    pub d: usize,
    pub l: u32,
    pub eta: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            nbar_total: 5.0,
            d: 15,
            l: 2,
            eta: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub range: AxisRange,
    pub fixed: FixedParams,
    pub probes: Vec<ProbeKind>,
    pub mescs_constraint: MescsConstraint,
    pub outputs: Vec<Quantity>,
    /// Evaluate `lossy` at this `δ` instead of `δ_opt`.
    pub delta: Option<f64>,
    /// When set, each point also compares its moments against the
    /// truncated-Fock oracle built at this tolerance.
    #[serde(default)]
    pub oracle_tol: Option<f64>,
}

fn as_integer(v: f64, what: &str) -> Result<u64> {
    let r = v.round();
    if (v - r).abs() > INTEGER_SLACK || r < 1.0 || r > u32::MAX as f64 {
        return Err(Error::Config(format!("{what} must be a positive integer, got {v}")));
    }
    Ok(r as u64)
}

/// One fully resolved evaluation site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitePoint {
    pub nbar_total: f64,
    pub d: usize,
    pub l: u32,
    pub eta: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.probes.is_empty() {
            return Err(Error::Config("no probe kinds selected".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no output quantities selected".into()));
        }
        if let Some(delta) = self.delta {
            if !delta.is_finite() {
                return Err(Error::Config(format!("delta must be finite, got {delta}")));
            }
        }
        self.sites().map(|_| ())
    }

    /// Axis values resolved into full parameter sets, validated.
    pub fn sites(&self) -> Result<Vec<(f64, SitePoint)>> {
        let values = AxisRange::new(self.range.start, self.range.stop, self.range.steps)?.values();
        let integral_nbar = self.probes.contains(&ProbeKind::Mnoons);
        let needs_eta = self.outputs.iter().any(|q| q.needs_eta());
        values
            .into_iter()
            .map(|v| {
                let mut p = SitePoint {
                    nbar_total: self.fixed.nbar_total,
                    d: self.fixed.d,
                    l: self.fixed.l,
                    eta: self.fixed.eta,
                };
                let mut shown = v;
                match self.axis {
                    Axis::NbarTotal => p.nbar_total = v,
                    Axis::D => {
                        p.d = as_integer(v, "d")? as usize;
                        shown = p.d as f64;
                    }
                    Axis::L => {
                        p.l = as_integer(v, "l")? as u32;
                        shown = p.l as f64;
                    }
                    Axis::Eta => p.eta = v,
                }
                if !(p.nbar_total.is_finite() && p.nbar_total > 0.0) {
                    return Err(Error::Config(format!("nbar_total must be > 0, got {}", p.nbar_total)));
                }
                if integral_nbar {
                    p.nbar_total = as_integer(p.nbar_total, "nbar_total (MNOONS selected)")? as f64;
                    if self.axis == Axis::NbarTotal {
                        shown = p.nbar_total;
                    }
                }
                if p.d == 0 || p.l == 0 {
                    return Err(Error::Config("d and l must be >= 1".into()));
                }
                if (needs_eta || self.axis == Axis::Eta) && !(p.eta > 0.0 && p.eta <= 1.0) {
                    return Err(Error::Config(format!("eta must lie in (0, 1], got {}", p.eta)));
                }
                Ok((shown, p))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub axis_name: Axis,
    pub axis_value: f64,
    pub probe: ProbeKind,
    pub quantity: Quantity,
    pub value: Option<f64>,
    pub error_code: Option<String>,
    pub diagnostics: BTreeMap<String, Value>,
}

fn probe_params(probe: &Probe) -> Value {
    serde_json::to_value(probe).unwrap_or(Value::Null)
}

/// Evaluates one quantity for one probe family at `site`.
pub fn evaluate(
    kind: ProbeKind,
    site: &SitePoint,
    constraint: MescsConstraint,
    quantity: Quantity,
    delta_override: Option<f64>,
    oracle_tol: Option<f64>,
) -> (Result<f64>, BTreeMap<String, Value>) {
    let mut diag = BTreeMap::new();
    let result = (|| {
        let spec = solve_params_for_nbar(kind, site.nbar_total, site.d, constraint)?;
        let cfg = SensingConfig::new(site.l, site.d)?;
        diag.insert("params".into(), probe_params(&spec.probe));
        let m = multimode_moments(&spec);
        if let Some(p) = m.printed {
            diag.insert("printed_g2_rel_deviation".into(), json!(p.rel_deviation));
        }
        if let Some(tol) = oracle_tol {
            match multimode_moments_oracle(&spec, tol) {
                Ok(o) => {
                    let dev = rel_diff(m.g2_m, o.g2_m).max(rel_diff(m.nbar_m, o.nbar_m));
                    diag.insert("oracle_rel_deviation".into(), json!(dev));
                }
                Err(e) => {
                    diag.insert("oracle_error".into(), json!(e.code()));
                }
            }
        }
        let value = match quantity {
            Quantity::Ideal => qcrb_ideal(&spec, &cfg)?,
            Quantity::G2 => m.g2_m,
            Quantity::Lossy => {
                let opt = delta_opt(&spec, site.eta)?;
                diag.insert("delta_opt".into(), json!(opt));
                let delta = delta_override.unwrap_or(opt);
                let loss = LossConfig::new(site.eta, delta)?;
                let approx = match delta_override {
                    None => qcrb_lossy(&spec, &cfg, site.eta)?,
                    Some(_) => {
                        if site.d < 2 {
                            return Err(Error::Domain("the large-d lossy bound needs d >= 2".into()));
                        }
                        diag.insert("delta".into(), json!(delta));
                        cq_trace_inverse_large_d(&spec, &cfg, &loss)?
                    }
                };
                if let Ok(exact) = cq_trace_inverse_exact(&spec, &cfg, &loss) {
                    diag.insert("exact_minus_approx".into(), json!(exact - approx));
                }
                approx
            }
            Quantity::Robustness => {
                diag.insert("delta_opt".into(), json!(delta_opt(&spec, site.eta)?));
                let r = robustness(&spec, &cfg, site.eta)?;
                diag.insert("exact_minus_ideal".into(), json!(r.exact_minus_ideal));
                r.value
            }
        };
        if !value.is_finite() {
            return Err(Error::Domain(format!("non-finite {quantity} value")));
        }
        Ok(value)
    })();
    if let Err(e) = &result {
        diag.insert("message".into(), json!(e.to_string()));
    }
    (result, diag)
}

/// Evaluates every (axis value, probe, quantity) triple. Points are
/// computed in parallel and returned axis-major, then probe in canonical
/// order, then quantity.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let mut probes = spec.probes.clone();
    probes.sort();
    probes.dedup();
    let mut outputs = spec.outputs.clone();
    outputs.sort();
    outputs.dedup();

    let mut jobs = Vec::new();
    for (shown, site) in spec.sites()? {
        for &kind in &probes {
            for &q in &outputs {
                jobs.push((shown, site, kind, q));
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(shown, site, kind, quantity)| {
            let (res, diagnostics) = evaluate(kind, &site, spec.mescs_constraint, quantity, spec.delta, spec.oracle_tol);
            let (value, error_code) = match res {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.code().to_string())),
            };
            CurvePoint {
                axis_name: spec.axis,
                axis_value: shown,
                probe: kind,
                quantity,
                value,
                error_code,
                diagnostics,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CSV_HEADER: [&str; 7] = [
    "axis_name",
    "axis_value",
    "probe",
    "quantity",
    "value",
    "error_code",
    "diagnostics_json",
];

pub fn write_csv<W: Write>(points: &[CurvePoint], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for p in points {
        let diag = serde_json::to_string(&p.diagnostics).map_err(std::io::Error::other)?;
        w.write_record([
            p.axis_name.as_str(),
            &format_real(p.axis_value),
            p.probe.as_str(),
            p.quantity.as_str(),
            &p.value.map(format_real).unwrap_or_default(),
            p.error_code.as_deref().unwrap_or(""),
            &diag,
        ])?;
    }
    w.flush()
}

pub fn write_jsonl<W: Write>(points: &[CurvePoint], mut out: W) -> std::io::Result<()> {
    for p in points {
        serde_json::to_writer(&mut out, p).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_points<W: Write>(points: &[CurvePoint], format: OutputFormat, out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(points, out),
        OutputFormat::Jsonl => write_jsonl(points, out),
    }
}

/// Baked-in curve families with the figure captions' fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig5a,
    Fig5b,
    Fig6a,
    Fig6b,
    Fig7a,
    Fig7b,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 10] = [
        FigurePreset::Fig2a,
        FigurePreset::Fig2b,
        FigurePreset::Fig3a,
        FigurePreset::Fig3b,
        FigurePreset::Fig5a,
        FigurePreset::Fig5b,
        FigurePreset::Fig6a,
        FigurePreset::Fig6b,
        FigurePreset::Fig7a,
        FigurePreset::Fig7b,
    ];

    pub fn id(self) -> &'static str {
        match self {
            FigurePreset::Fig2a => "fig2a",
            FigurePreset::Fig2b => "fig2b",
            FigurePreset::Fig3a => "fig3a",
            FigurePreset::Fig3b => "fig3b",
            FigurePreset::Fig5a => "fig5a",
            FigurePreset::Fig5b => "fig5b",
            FigurePreset::Fig6a => "fig6a",
            FigurePreset::Fig6b => "fig6b",
            FigurePreset::Fig7a => "fig7a",
            FigurePreset::Fig7b => "fig7b",
        }
    }

    /// Sweep for this preset; `eta_min` is the lower end of `η` axes.
    pub fn spec(self, eta_min: f64) -> SweepSpec {
        use FigurePreset::*;
        let fixed = |nbar_total, d, l, eta| FixedParams { nbar_total, d, l, eta };
        let nbar_axis = AxisRange { start: 1.0, stop: 10.0, steps: 10 };
        let (axis, range, fixed, outputs) = match self {
            Fig2a => (Axis::NbarTotal, nbar_axis, fixed(5.0, 15, 2, 1.0), vec![Quantity::Ideal]),
            Fig2b => (Axis::NbarTotal, nbar_axis, fixed(5.0, 15, 2, 1.0), vec![Quantity::G2]),
            Fig3a => (
                Axis::D,
                AxisRange { start: 1.0, stop: 30.0, steps: 30 },
                fixed(5.0, 15, 2, 1.0),
                vec![Quantity::Ideal],
            ),
            Fig3b => (
                Axis::L,
                AxisRange { start: 1.0, stop: 10.0, steps: 10 },
                fixed(5.0, 15, 2, 1.0),
                vec![Quantity::Ideal],
            ),
            Fig5a => (
                Axis::Eta,
                AxisRange { start: eta_min, stop: 1.0, steps: 20 },
                fixed(5.0, 15, 2, 0.7),
                vec![Quantity::Ideal, Quantity::Lossy],
            ),
            Fig5b => (Axis::NbarTotal, nbar_axis, fixed(5.0, 15, 2, 0.7), vec![Quantity::Ideal, Quantity::Lossy]),
            Fig6a => (
                Axis::D,
                AxisRange { start: 2.0, stop: 30.0, steps: 29 },
                fixed(5.0, 15, 2, 0.7),
                vec![Quantity::Ideal, Quantity::Lossy],
            ),
            Fig6b => (
                Axis::L,
                AxisRange { start: 1.0, stop: 10.0, steps: 10 },
                fixed(5.0, 15, 2, 0.7),
                vec![Quantity::Ideal, Quantity::Lossy],
            ),
            Fig7a => (
                Axis::D,
                AxisRange { start: 2.0, stop: 30.0, steps: 29 },
                fixed(5.0, 10, 2, 0.7),
                vec![Quantity::Robustness],
            ),
            Fig7b => (
                Axis::L,
                AxisRange { start: 1.0, stop: 10.0, steps: 10 },
                fixed(5.0, 10, 2, 0.7),
                vec![Quantity::Robustness],
            ),
        };
        SweepSpec {
            axis,
            range,
            fixed,
            probes: ProbeKind::ALL.to_vec(),
            mescs_constraint: MescsConstraint::EqualSplit,
            outputs,
            delta: None,
            oracle_tol: None,
        }
    }
}

impl FromStr for FigurePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        FigurePreset::ALL
            .into_iter()
            .find(|p| p.id() == t)
            .ok_or_else(|| Error::Config(format!("unknown figure preset '{s}'")))
    }
}

/// Everything known about one probe at one sensing configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub probe: Probe,
    pub d: usize,
    pub l: u32,
    pub norm_sq: f64,
    pub nbar_m: f64,
    pub nbar_total: f64,
    pub g2_m: f64,
    pub printed_g2: Option<f64>,
    pub qfim_a: f64,
    pub qfim_b: f64,
    pub ideal: Option<f64>,
    pub eta: Option<f64>,
    pub delta_opt: Option<f64>,
    pub delta: Option<f64>,
    pub lossy_approx: Option<f64>,
    pub lossy_exact: Option<f64>,
    pub robustness: Option<f64>,
    /// Per-field failures, keyed by field name.
    pub errors: BTreeMap<String, String>,
}

/// One-shot evaluation with diagnostics. Fails only when the probe or
/// geometry is invalid; downstream failures land in `errors`.
pub fn point_report(spec: &ProbeSpec, l: u32, eta: Option<f64>, delta: Option<f64>) -> Result<PointReport> {
    spec.probe.validate()?;
    let cfg = SensingConfig::new(l, spec.d)?;
    let m = multimode_moments(spec);
    let f = qfim(spec, &cfg)?;
    let mut errors = BTreeMap::new();
    let mut keep = |name: &str, r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.insert(name.to_string(), format!("{}: {e}", e.code()));
            None
        }
    };
    let ideal = keep("ideal", qcrb_ideal(spec, &cfg));
    let mut report = PointReport {
        probe: spec.probe,
        d: spec.d,
        l,
        norm_sq: m.norm_sq,
        nbar_m: m.nbar_m,
        nbar_total: m.nbar_total,
        g2_m: m.g2_m,
        printed_g2: m.printed.map(|p| p.printed_g2),
        qfim_a: f.a,
        qfim_b: f.b,
        ideal,
        eta,
        delta_opt: None,
        delta: None,
        lossy_approx: None,
        lossy_exact: None,
        robustness: None,
        errors: BTreeMap::new(),
    };
    if let Some(eta) = eta {
        report.delta_opt = keep("delta_opt", delta_opt(spec, eta));
        let used = delta.or(report.delta_opt);
        report.delta = used;
        if let Some(dv) = used {
            match LossConfig::new(eta, dv) {
                Ok(loss) => {
                    report.lossy_exact = keep("lossy_exact", cq_trace_inverse_exact(spec, &cfg, &loss));
                    report.lossy_approx = keep(
                        "lossy_approx",
                        if spec.d < 2 {
                            Err(Error::Domain("the large-d lossy bound needs d >= 2".into()))
                        } else if delta.is_some() {
                            cq_trace_inverse_large_d(spec, &cfg, &loss)
                        } else {
                            qcrb_lossy(spec, &cfg, eta)
                        },
                    );
                }
                Err(e) => {
                    keep("lossy", Err(e));
                }
            }
        }
        report.robustness = keep("robustness", robustness(spec, &cfg, eta).map(|r| r.value));
    }
    report.errors = errors;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: AxisRange = "1:10:10".parse().unwrap();
        assert_eq!(r.values(), (1..=10).map(f64::from).collect::<Vec<_>>());
        let r: AxisRange = "0.05:1:20".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 20);
        assert_eq!((v[0], v[19]), (0.05, 1.0));
        assert_eq!("3".parse::<AxisRange>().unwrap().values(), vec![3.0]);
        for bad in ["", "1:2", "1:2:0", "a:b:3", "1:2:3:4", "1:2:1", "nan:1:3", "0:1:100001"] {
            assert!(bad.parse::<AxisRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn integer_axes_are_enforced() {
        let mut s = FigurePreset::Fig3a.spec(DEFAULT_ETA_MIN);
        s.range = "1:2:3".parse().unwrap();
        assert!(s.validate().is_err());
        let mut s = FigurePreset::Fig2a.spec(DEFAULT_ETA_MIN);
        s.range = "1:2:3".parse().unwrap();
        assert!(s.validate().is_err());
        s.probes = vec![ProbeKind::Mecs];
        assert!(s.validate().is_ok());
        let mut s = FigurePreset::Fig5a.spec(DEFAULT_ETA_MIN);
        s.range = "0:1:5".parse().unwrap();
        assert!(s.validate().is_err());
    }

    #[test]
    fn preset_parameters() {
        let s = FigurePreset::Fig2a.spec(DEFAULT_ETA_MIN);
        assert_eq!((s.axis, s.fixed.l, s.fixed.d), (Axis::NbarTotal, 2, 15));
        assert_eq!((s.range.start, s.range.stop), (1.0, 10.0));
        assert_eq!(s.outputs, vec![Quantity::Ideal]);
        let s = FigurePreset::Fig5a.spec(DEFAULT_ETA_MIN);
        assert_eq!(s.axis, Axis::Eta);
        assert_eq!((s.range.start, s.range.stop), (0.05, 1.0));
        assert_eq!((s.fixed.l, s.fixed.d, s.fixed.nbar_total), (2, 15, 5.0));
        assert!(s.outputs.contains(&Quantity::Lossy));
        let s = FigurePreset::Fig7b.spec(DEFAULT_ETA_MIN);
        assert_eq!(s.axis, Axis::L);
        assert_eq!((s.fixed.eta, s.fixed.d, s.fixed.nbar_total), (0.7, 10, 5.0));
        assert_eq!(s.outputs, vec![Quantity::Robustness]);
        for p in FigurePreset::ALL {
            assert_eq!(p.id().parse::<FigurePreset>().unwrap(), p);
            assert!(p.spec(DEFAULT_ETA_MIN).validate().is_ok());
        }
    }

    #[test]
    fn ordering_and_error_records() {
        let mut s = FigurePreset::Fig3a.spec(DEFAULT_ETA_MIN);
        s.range = "1:2:2".parse().unwrap();
        s.outputs = vec![Quantity::Lossy, Quantity::Ideal];
        let pts = run_sweep(&s).unwrap();
        assert_eq!(pts.len(), 2 * 4 * 2);
        assert_eq!((pts[0].axis_value, pts[0].probe, pts[0].quantity), (1.0, ProbeKind::Mnoons, Quantity::Ideal));
        assert_eq!((pts[1].probe, pts[1].quantity), (ProbeKind::Mnoons, Quantity::Lossy));
        assert_eq!(pts[2].probe, ProbeKind::Mecs);
        // d = 1 has no large-d lossy bound
        assert_eq!(pts[1].error_code.as_deref(), Some("domain"));
        assert!(pts[1].value.is_none());
        assert!(pts[8..].iter().all(|p| p.axis_value == 2.0 && p.value.is_some()));
    }

    #[test]
    fn csv_is_deterministic_and_well_formed() {
        let s = FigurePreset::Fig5b.spec(DEFAULT_ETA_MIN);
        let render = || {
            let mut buf = Vec::new();
            write_csv(&run_sweep(&s).unwrap(), &mut buf).unwrap();
            buf
        };
        let a = render();
        assert_eq!(a, render());
        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "axis_name,axis_value,probe,quantity,value,error_code,diagnostics_json"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("nbar_total,1.0000000000000000e0,MNOONS,ideal,"));
        assert_eq!(text.lines().count(), 1 + 10 * 4 * 2);
    }

    #[test]
    fn doubling_l_quarters_ideal_points() {
        let s = FigurePreset::Fig2a.spec(DEFAULT_ETA_MIN);
        let mut s2 = s.clone();
        s2.fixed.l = 4;
        for (a, b) in run_sweep(&s).unwrap().iter().zip(run_sweep(&s2).unwrap()) {
            let (a, b) = (a.value.unwrap(), b.value.unwrap());
            assert!((a / b - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_override_changes_lossy_only() {
        let mut s = FigurePreset::Fig5a.spec(DEFAULT_ETA_MIN);
        s.range = "0.7".parse().unwrap();
        s.probes = vec![ProbeKind::Mesvs];
        let base = run_sweep(&s).unwrap();
        s.delta = Some(0.0);
        let over = run_sweep(&s).unwrap();
        assert_eq!(base[0].value, over[0].value);
        // δ_opt maximizes the bound, so any other δ gives less
        assert!(over[1].value.unwrap() < base[1].value.unwrap());
    }

    #[test]
    fn point_reports() {
        let spec = ProbeSpec::new(Probe::Noon { n: 1 }, 1).unwrap();
        let r = point_report(&spec, 1, None, None).unwrap();
        assert!((r.ideal.unwrap() - 0.25).abs() < 1e-15);

        let spec = solve_params_for_nbar(ProbeKind::Mecs, 5.0, 15, MescsConstraint::EqualSplit).unwrap();
        let r = point_report(&spec, 2, Some(1.0), None).unwrap();
        assert!((r.lossy_exact.unwrap() / r.ideal.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.errors.is_empty());

        let spec = ProbeSpec { probe: Probe::SqueezedVacuum { r: 0.0 }, d: 3 };
        assert_eq!(point_report(&spec, 2, None, None).unwrap_err().code(), "invalid_parameter");
    }
}
