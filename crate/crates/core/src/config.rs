//! Optional JSON configuration file. Every field may be omitted; command
//! line flags take precedence over whatever is set here.
//!
//! ```json
//! {
//!   "probe": "MESVS,MECS",
//!   "nbar": 5, "d": 15, "l": 2, "eta": 0.7,
//!   "axis": "eta", "range": "0.05:1:20",
//!   "outputs": "lossy,ideal",
//!   "mescs_constraint": "fixed_r2=0.5",
//!   "format": "jsonl"
//! }
//! ```

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::probe::{parse_probe_list, MescsConstraint, ProbeKind};
use crate::sweep::{parse_quantity_list, Axis, AxisRange, OutputFormat, Quantity};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    probe: Option<String>,
    nbar: Option<f64>,
    d: Option<usize>,
    l: Option<u32>,
    eta: Option<f64>,
    delta: Option<f64>,
    mescs_constraint: Option<String>,
    format: Option<String>,
    tol: Option<f64>,
    axis: Option<String>,
    range: Option<String>,
    outputs: Option<String>,
    eta_min: Option<f64>,
    strict: Option<bool>,
    nbar_grid: Option<Vec<f64>>,
    d_grid: Option<Vec<usize>>,
    l_grid: Option<Vec<u32>>,
    eta_grid: Option<Vec<f64>>,
}

/// Parsed and type-checked configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub probes: Option<Vec<ProbeKind>>,
    pub nbar: Option<f64>,
    pub d: Option<usize>,
    pub l: Option<u32>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub mescs_constraint: Option<MescsConstraint>,
    pub format: Option<OutputFormat>,
    pub tol: Option<f64>,
    pub axis: Option<Axis>,
    pub range: Option<AxisRange>,
    pub outputs: Option<Vec<Quantity>>,
    pub eta_min: Option<f64>,
    pub strict: Option<bool>,
    pub nbar_grid: Option<Vec<f64>>,
    pub d_grid: Option<Vec<usize>>,
    pub l_grid: Option<Vec<u32>>,
    pub eta_grid: Option<Vec<f64>>,
}

fn finite(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !x.is_finite() => Err(Error::Config(format!("{name} must be finite"))),
        other => Ok(other),
    }
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(t) = raw.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("tol must be > 0, got {t}")));
            }
        }
        let finite_grid = |name: &str, g: &Option<Vec<f64>>| -> Result<()> {
            match g {
                Some(v) if v.iter().any(|x| !x.is_finite()) => Err(Error::Config(format!("{name} must be finite"))),
                _ => Ok(()),
            }
        };
        finite_grid("nbar_grid", &raw.nbar_grid)?;
        finite_grid("eta_grid", &raw.eta_grid)?;
        Ok(Self {
            probes: raw.probe.as_deref().map(parse_probe_list).transpose()?,
            nbar: finite("nbar", raw.nbar)?,
            d: raw.d,
            l: raw.l,
            eta: finite("eta", raw.eta)?,
            delta: finite("delta", raw.delta)?,
            mescs_constraint: raw.mescs_constraint.as_deref().map(str::parse).transpose()?,
            format: raw.format.as_deref().map(str::parse).transpose()?,
            tol: raw.tol,
            axis: raw.axis.as_deref().map(str::parse).transpose()?,
            range: raw.range.as_deref().map(str::parse).transpose()?,
            outputs: raw.outputs.as_deref().map(parse_quantity_list).transpose()?,
            eta_min: finite("eta_min", raw.eta_min)?,
            strict: raw.strict,
            nbar_grid: raw.nbar_grid,
            d_grid: raw.d_grid,
            l_grid: raw.l_grid,
            eta_grid: raw.eta_grid,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
