//! Command-line front end for `oam-qcrb`: sweeps, figure presets, single
//! points and the verification report.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use oam_qcrb::config::FileConfig;
use oam_qcrb::error::Error;
use oam_qcrb::probe::{parse_probe_list, solve_params_for_nbar, MescsConstraint, Probe, ProbeKind, ProbeSpec};
use oam_qcrb::sweep::{
    parse_quantity_list, point_report, run_sweep, write_points, Axis, AxisRange, FigurePreset, FixedParams,
    OutputFormat, Quantity, SweepSpec, DEFAULT_ETA_MIN,
};
use oam_qcrb::verify::{report_json, verify, VerifyProfile};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY_FAILED: u8 = 2;

/// Quantum Cramér–Rao bounds for simultaneous OAM angular-displacement
/// estimation with NOON-like multimode probes.
#[derive(Parser, Debug)]
#[command(name = "oam-qcrb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one parameter and emit one record per (value, probe, quantity).
    Sweep(SweepArgs),
    /// Emit the curves behind a figure preset (fig2a … fig7b).
    Figure(FigureArgs),
    /// Evaluate one probe with full diagnostics.
    Point(PointArgs),
    /// Run the formula cross-check suite and print a JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Probe kinds: comma list of MNOONS, MECS, MESVS, MESCS, or `all`.
    #[arg(long, value_parser = parse_probes)]
    probe: Option<ProbeList>,
    /// Total mean photon number N̄.
    #[arg(long)]
    nbar: Option<f64>,
    /// Number of estimated displacements.
    #[arg(long)]
    d: Option<usize>,
    /// OAM quanta per photon.
    #[arg(long)]
    l: Option<u32>,
    /// Transmissivity in (0, 1].
    #[arg(long)]
    eta: Option<f64>,
    /// Variational parameter; defaults to the closed-form optimum.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// equal_split, fixed_r2=<r>, or fixed_beta=<beta>.
    #[arg(long, value_parser = parse_constraint)]
    mescs_constraint: Option<MescsConstraint>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Tolerance for truncated-Fock oracles and verification thresholds.
    #[arg(long)]
    tol: Option<f64>,
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// nbar_total, d, l, or eta.
    #[arg(long, value_parser = parse_axis)]
    axis: Option<Axis>,
    /// start:stop:steps (inclusive), or a single value.
    #[arg(long, value_parser = parse_range)]
    range: Option<AxisRange>,
    /// Comma list of ideal, lossy, robustness, g2.
    #[arg(long, value_parser = parse_quantities)]
    outputs: Option<QuantityList>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// Preset id, e.g. fig5a.
    preset: String,
    /// Lower end of η axes.
    #[arg(long)]
    eta_min: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Photon number of a NOON-like probe.
    #[arg(long)]
    n: Option<u32>,
    /// Coherent amplitude.
    #[arg(long)]
    alpha: Option<f64>,
    /// Squeezing parameter.
    #[arg(long)]
    r: Option<f64>,
    /// Displacement of a squeezed coherent probe.
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Exit with status 2 when any family fails.
    #[arg(long)]
    strict: bool,
    /// Comma list of N̄ values; empty for none.
    #[arg(long, value_parser = parse_f64_list)]
    nbar_grid: Option<F64List>,
    /// Comma list of mode counts d.
    #[arg(long, value_parser = parse_usize_list)]
    d_grid: Option<UsizeList>,
    /// Comma list of OAM quanta l.
    #[arg(long, value_parser = parse_u32_list)]
    l_grid: Option<U32List>,
    /// Comma list of transmissivities.
    #[arg(long, value_parser = parse_f64_list)]
    eta_grid: Option<F64List>,
    #[command(flatten)]
    common: Common,
}

// Newtypes keep clap from treating the lists as repeated arguments.
#[derive(Debug, Clone)]
struct F64List(Vec<f64>);
#[derive(Debug, Clone)]
struct UsizeList(Vec<usize>);
#[derive(Debug, Clone)]
struct U32List(Vec<u32>);
#[derive(Debug, Clone)]
struct ProbeList(Vec<ProbeKind>);
#[derive(Debug, Clone)]
struct QuantityList(Vec<Quantity>);

fn parse_probes(s: &str) -> Result<ProbeList, Error> {
    parse_probe_list(s).map(ProbeList)
}

fn parse_quantities(s: &str) -> Result<QuantityList, Error> {
    parse_quantity_list(s).map(QuantityList)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| format!("bad list element '{t}'")))
        .collect()
}

fn parse_f64_list(s: &str) -> Result<F64List, String> {
    let v: Vec<f64> = parse_list(s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("list elements must be finite".into());
    }
    Ok(F64List(v))
}

fn parse_usize_list(s: &str) -> Result<UsizeList, String> {
    parse_list(s).map(UsizeList)
}

fn parse_u32_list(s: &str) -> Result<U32List, String> {
    parse_list(s).map(U32List)
}

fn parse_constraint(s: &str) -> Result<MescsConstraint, Error> {
    s.parse()
}

fn parse_format(s: &str) -> Result<OutputFormat, Error> {
    s.parse()
}

fn parse_axis(s: &str) -> Result<Axis, Error> {
    s.parse()
}

fn parse_range(s: &str) -> Result<AxisRange, Error> {
    s.parse()
}

/// Failure that maps onto an exit status.
enum Failure {
    Usage(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

fn load_config(common: &Common) -> Result<FileConfig, Failure> {
    match &common.config {
        Some(path) => Ok(FileConfig::load(path)?),
        None => Ok(FileConfig::default()),
    }
}

fn open_out<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn check_tol(tol: Option<f64>) -> Result<Option<f64>, Failure> {
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Failure::Usage(format!("--tol must be > 0, got {t}"))),
        other => Ok(other),
    }
}

fn emit(spec: &SweepSpec, common: &Common, file: &FileConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    spec.validate()?;
    let points = run_sweep(spec)?;
    let format = common.format.or(file.format).unwrap_or_default();
    let mut out = open_out(common.out.as_deref(), stdout)?;
    write_points(&points, format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = &args.common;
    let file = load_config(c)?;
    let defaults = FixedParams::default();
    let axis = args
        .axis
        .or(file.axis)
        .ok_or_else(|| Failure::Usage("sweep needs --axis".into()))?;
    let range = args
        .range
        .or(file.range)
        .ok_or_else(|| Failure::Usage("sweep needs --range".into()))?;
    let spec = SweepSpec {
        axis,
        range,
        fixed: FixedParams {
            nbar_total: c.nbar.or(file.nbar).unwrap_or(defaults.nbar_total),
            d: c.d.or(file.d).unwrap_or(defaults.d),
            l: c.l.or(file.l).unwrap_or(defaults.l),
            eta: c.eta.or(file.eta).unwrap_or(defaults.eta),
        },
        probes: c.probe.clone().map(|p| p.0).or(file.probes.clone()).unwrap_or(ProbeKind::ALL.to_vec()),
        mescs_constraint: c.mescs_constraint.or(file.mescs_constraint).unwrap_or_default(),
        outputs: args.outputs.map(|q| q.0).or(file.outputs.clone()).unwrap_or(vec![Quantity::Ideal]),
        delta: c.delta.or(file.delta),
        oracle_tol: check_tol(c.tol.or(file.tol))?,
    };
    emit(&spec, c, &file, stdout)
}

fn cmd_figure(args: FigureArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = &args.common;
    let file = load_config(c)?;
    let preset: FigurePreset = args.preset.parse()?;
    let eta_min = args.eta_min.or(file.eta_min).unwrap_or(DEFAULT_ETA_MIN);
    if !(eta_min > 0.0 && eta_min < 1.0) {
        return Err(Failure::Usage(format!("--eta-min must lie in (0, 1), got {eta_min}")));
    }
    if c.nbar.is_some() || c.d.is_some() || c.l.is_some() || c.eta.is_some() {
        return Err(Failure::Usage(
            "figure presets fix N̄, d, l and η; use `sweep` for other values".into(),
        ));
    }
    let mut spec = preset.spec(eta_min);
    if let Some(p) = c.probe.clone().map(|p| p.0).or(file.probes.clone()) {
        spec.probes = p;
    }
    if let Some(m) = c.mescs_constraint.or(file.mescs_constraint) {
        spec.mescs_constraint = m;
    }
    spec.delta = c.delta.or(file.delta);
    spec.oracle_tol = check_tol(c.tol.or(file.tol))?;
    emit(&spec, c, &file, stdout)
}

fn explicit_probe(args: &PointArgs) -> Result<Option<Probe>, Failure> {
    let probe = match (args.n, args.alpha, args.r, args.beta) {
        (None, None, None, None) => return Ok(None),
        (Some(n), None, None, None) => Probe::Noon { n },
        (None, Some(alpha), None, None) => Probe::Coherent { alpha },
        (None, None, Some(r), None) => Probe::SqueezedVacuum { r },
        (None, None, r, Some(beta)) => Probe::SqueezedCoherent { beta, r: r.unwrap_or(0.0) },
        _ => {
            return Err(Failure::Usage(
                "give one of --n, --alpha, --r, or --beta [--r]".into(),
            ))
        }
    };
    Ok(Some(probe))
}

fn cmd_point(args: PointArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = &args.common;
    let file = load_config(c)?;
    let d = c.d.or(file.d).unwrap_or(FixedParams::default().d);
    let l = c.l.or(file.l).unwrap_or(FixedParams::default().l);
    let eta = c.eta.or(file.eta);
    let delta = c.delta.or(file.delta);
    let constraint = c.mescs_constraint.or(file.mescs_constraint).unwrap_or_default();
    let kinds = c.probe.clone().map(|p| p.0).or(file.probes.clone());

    let spec = match explicit_probe(&args)? {
        Some(probe) => {
            if let Some(k) = &kinds {
                if k.as_slice() != [probe.kind()] {
                    return Err(Failure::Usage(format!(
                        "--probe disagrees with the explicit {} parameters",
                        probe.kind()
                    )));
                }
            }
            Ok(ProbeSpec { probe, d })
        }
        None => {
            let kind = match kinds.as_deref() {
                Some([k]) => *k,
                _ => return Err(Failure::Usage("point needs exactly one --probe, or explicit parameters".into())),
            };
            let nbar = c
                .nbar
                .or(file.nbar)
                .ok_or_else(|| Failure::Usage("point needs --nbar with --probe".into()))?;
            solve_params_for_nbar(kind, nbar, d, constraint)
        }
    };
    let mut out = open_out(c.out.as_deref(), stdout)?;
    let result = spec.and_then(|s| point_report(&s, l, eta, delta));
    let status = match &result {
        Ok(report) => {
            serde_json::to_writer(&mut out, report).map_err(io::Error::other)?;
            Ok(())
        }
        Err(e) => {
            let record = serde_json::json!({ "error_code": e.code(), "message": e.to_string() });
            serde_json::to_writer(&mut out, &record).map_err(io::Error::other)?;
            Err(Failure::Usage(e.to_string()))
        }
    };
    out.write_all(b"\n")?;
    out.flush()?;
    status
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let c = &args.common;
    let file = load_config(c)?;
    let base = VerifyProfile::default();
    let profile = VerifyProfile {
        tol: check_tol(c.tol.or(file.tol))?,
        nbar_grid: args.nbar_grid.map(|g| g.0).or(file.nbar_grid.clone()).unwrap_or(base.nbar_grid),
        d_grid: args.d_grid.map(|g| g.0).or(file.d_grid.clone()).unwrap_or(base.d_grid),
        l_grid: args.l_grid.map(|g| g.0).or(file.l_grid.clone()).unwrap_or(base.l_grid),
        eta_grid: args.eta_grid.map(|g| g.0).or(file.eta_grid.clone()).unwrap_or(base.eta_grid),
        mescs_constraint: c.mescs_constraint.or(file.mescs_constraint).unwrap_or_default(),
    };
    let report = verify(&profile);
    let mut out = open_out(c.out.as_deref(), stdout)?;
    writeln!(out, "{}", report_json(&report)?)?;
    out.flush()?;
    let strict = args.strict || file.strict.unwrap_or(false);
    if strict && !report.passed {
        return Err(Failure::Verify);
    }
    Ok(())
}

/// Parses a command line without running it. Returns the rendered clap
/// message on failure, including for `--help` and `--version`.
pub fn check_args<I, T>(args: I) -> Result<(), String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args).map(|_| ()).map_err(|e| e.render().to_string())
}

/// Runs the command line `args` (program name first), writing records to
/// `stdout` and diagnostics to `stderr`. Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Figure(a) => cmd_figure(a, stdout),
        Command::Point(a) => cmd_point(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verify) => {
            let _ = writeln!(stderr, "verification failed");
            EXIT_VERIFY_FAILED
        }
    }
}
