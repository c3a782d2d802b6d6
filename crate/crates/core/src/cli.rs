//! Command-line front end. Every command writes one report that embeds its
//! resolved configuration, as JSON or as CSV with a leading `# config` line.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    bound_table, dyson_propagator_diff, synthesis_norm, synthesis_sweep, table1_check, trotter_commutator,
    unit_cell_report, BoundModel, ErrorReport, SynthesisModel, TrotterModel,
};
use crate::compiler::{
    check_structure, compile, simulate, CompileOptions, ModelKind, RealisticOptions, Step, TargetModel,
};
use crate::device::{Boundary, DeviceParams, Driven, Lattice, ParamMap};
use crate::error::{Error, Result};
use crate::frames::{
    fit_power_law, reference_device, uqf_unitarity_defect, verify_effective, Integrator, IntegratorOptions,
};
use crate::hamiltonian::{build, HamiltonianKind};
use crate::pauli::{Numerics, Pauli, PauliString, PauliSum, StateVector};

#[derive(Debug, Parser)]
#[command(name = "crda", version, about = "Cross-resonance digital-analog simulation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Key-value or JSON parameter file; command-line flags override it.
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Output path. `json` or `csv` alone selects the format and writes to stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized numerics.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a Hamiltonian as a Pauli sum.
    Hamiltonian(HamArgs),
    /// Compare integrated frame dynamics against the effective Hamiltonian.
    VerifyFrames(FrameArgs),
    /// Run a compiled digital-analog schedule on a product state.
    Simulate(SimArgs),
    /// Error estimates: synthesis, dyson, table1, trotter, unitcell, bounds.
    Errors(ErrArgs),
    /// Export the block schedule of a target model.
    Compile(CompileArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub boundary: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct HamArgs {
    #[arg(long)]
    pub kind: String,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameSweep {
    /// Scale `Ω/δ` only.
    OmegaRatio,
    /// Scale `g/δ` only.
    GRatio,
    /// Scale both ratios together.
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct FrameArgs {
    /// Final time (default `20π/|δ|`).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub g_over_delta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub omega_over_delta: f64,
    #[arg(long, default_value = "odd")]
    pub driven: String,
    /// Drop the counter-rotating drive terms.
    #[arg(long)]
    pub rwa: bool,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Magnus4)]
    pub integrator: IntegratorArg,
    #[arg(long, value_enum)]
    pub sweep: Option<FrameSweep>,
    /// Swept values of the leading ratio, `start:stop`.
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub points: usize,
    /// Geometric spacing of sweep points.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorArg {
    Midpoint,
    Magnus4,
}

#[derive(Debug, Args, Serialize)]
pub struct SimArgs {
    #[arg(long)]
    pub model: String,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub blocks: Option<usize>,
    /// `zk` (site k, 1-based), `sz-total` (½Σz) or `pauli:<pattern>`; repeatable.
    #[arg(long)]
    pub observable: Vec<String>,
    /// Initial computational basis state as a bitstring, site 1 first (default all zeros).
    #[arg(long)]
    pub state: Option<String>,
    /// Replace effective analog segments by the exact quad-frame dynamics.
    #[arg(long)]
    pub realistic: bool,
    /// Also report the exact target evolution.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub fuse: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Synthesis,
    Dyson,
    Table1,
    Trotter,
    Unitcell,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrSweep {
    T,
    N,
    Size,
}

#[derive(Debug, Args, Serialize)]
pub struct ErrArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// `Ω/δ` (default 1e−4).
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Linear size for `bounds`.
    #[arg(long)]
    pub size: Option<usize>,
    /// Also report the worst deviation over this many times in one period.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub sweep: Option<ErrSweep>,
    #[arg(long)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CompileArgs {
    #[arg(long)]
    pub model: String,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub fuse: bool,
}

/// Exit status classes.
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_COMPUTE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Params(_)
        | Error::Pattern(_)
        | Error::Unsupported(_)
        | Error::ZeroDetuning(_)
        | Error::SizeMismatch { .. } => EXIT_USAGE,
        Error::DenseLimit { .. } | Error::StateLimit { .. } | Error::QubitCount(_) => EXIT_RESOURCE,
        Error::NoConvergence { .. } | Error::Structure(_) | Error::NonHermitian(_) | Error::NonFinite(_) => {
            EXIT_COMPUTE
        }
        Error::Io(_) | Error::Json(_) => EXIT_OTHER,
    }
}

fn error_kind(code: i32) -> &'static str {
    match code {
        EXIT_USAGE => "usage",
        EXIT_RESOURCE => "resource",
        EXIT_COMPUTE => "compute",
        _ => "other",
    }
}

/// Machine-readable error object written to stderr.
pub fn error_json(code: i32, message: &str) -> String {
    json!({"error": error_kind(code), "exit_code": code, "message": message}).to_string()
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", error_json(EXIT_USAGE, e.to_string().trim()));
            return EXIT_USAGE;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("{}", error_json(code, &e.to_string()));
            code
        }
    }
}

/// Destination and format after resolving `--out` and `--format`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

pub fn resolve_output(out: Option<&str>, format: Option<Format>) -> Result<Output> {
    let (path, implied) = match out {
        None | Some("-") => (None, None),
        Some("json") => (None, Some(Format::Json)),
        Some("csv") => (None, Some(Format::Csv)),
        Some(p) => {
            let ext = std::path::Path::new(p).extension().and_then(|e| e.to_str());
            let f = match ext {
                Some("csv") => Some(Format::Csv),
                Some("json") => Some(Format::Json),
                _ => None,
            };
            (Some(PathBuf::from(p)), f)
        }
    };
    if let (Some(a), Some(b)) = (implied, format) {
        if a != b {
            return Err(Error::Params(format!("--out implies {a:?} but --format is {b:?}")));
        }
    }
    Ok(Output {
        path,
        format: format.or(implied).unwrap_or(Format::Json),
    })
}

/// Tabular report: header, rows, and the JSON form.
struct Report {
    config: Value,
    body: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Params("--threads must be positive".into()));
        }
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let output = resolve_output(cli.out.as_deref(), cli.format)?;
    let file = match &cli.params {
        Some(p) => ParamMap::parse(&std::fs::read_to_string(p)?)?,
        None => ParamMap::default(),
    };
    let mut numerics = Numerics::default();
    if let Some(s) = cli.seed {
        numerics.seed = s;
    }
    let mut report = match &cli.command {
        Command::Hamiltonian(a) => hamiltonian_cmd(a, &file)?,
        Command::VerifyFrames(a) => frames_cmd(a, &file, cli.params.is_some(), &numerics)?,
        Command::Simulate(a) => simulate_cmd(a, &file, &numerics)?,
        Command::Errors(a) => errors_cmd(a, &file, &numerics)?,
        Command::Compile(a) => compile_cmd(a, &file)?,
    };
    let global = json!({
        "params_file": cli.params.as_ref().map(|p| p.display().to_string()),
        "params": file.0,
        "format": output.format,
        "seed": numerics.seed,
        "threads": cli.threads,
    });
    if let Value::Object(m) = &mut report.config {
        m.insert("global".into(), global);
    }
    let text = match output.format {
        Format::Json => {
            let mut v = json!({"config": report.config});
            if let (Value::Object(dst), Value::Object(src)) = (&mut v, report.body) {
                dst.extend(src);
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => {
            let mut s = format!("# config {}\n", serde_json::to_string(&report.config)?);
            s += &report.header.join(",");
            s.push('\n');
            for r in &report.rows {
                s += &r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
                s.push('\n');
            }
            s
        }
    };
    match &output.path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn lattice_from(a: &LatticeArgs, file: &ParamMap, two_d: bool) -> Result<Lattice> {
    let boundary: Option<Boundary> = a
        .boundary
        .clone()
        .or_else(|| file.0.get("boundary").cloned())
        .map(|s| s.parse())
        .transpose()?;
    let nx = a.nx.or(file.get_usize("nx")?);
    let ny = a.ny.or(file.get_usize("ny")?);
    if two_d || nx.is_some() || ny.is_some() {
        let nx = nx.unwrap_or(4);
        let ny = ny.unwrap_or(nx);
        return Lattice::square(nx, ny, boundary.unwrap_or(Boundary::Periodic));
    }
    let n =
        a.n.or(file.get_usize("n")?)
            .ok_or_else(|| Error::Params("missing --n".into()))?;
    Lattice::chain(n, boundary.unwrap_or(Boundary::Open))
}

fn lattice_json(l: &Lattice) -> Value {
    json!({"nx": l.nx, "ny": l.ny, "dim": l.dim, "boundary": l.boundary})
}

fn pick(flag: Option<f64>, file: &ParamMap, key: &str, default: f64) -> Result<f64> {
    Ok(match flag {
        Some(v) => v,
        None => file.get_f64(key)?.unwrap_or(default),
    })
}

fn hamiltonian_cmd(a: &HamArgs, file: &ParamMap) -> Result<Report> {
    let kind: HamiltonianKind = a.kind.parse()?;
    let j = pick(a.j, file, "J", 1.0)?;
    let lat = lattice_from(&a.lattice, file, kind.is_2d())?;
    let device = if kind.needs_device() {
        let mut m = file.clone();
        m.set("n", lat.nqubits());
        if lat.dim == 1 {
            m.set(
                "boundary",
                if lat.boundary == Boundary::Periodic {
                    "periodic"
                } else {
                    "open"
                },
            );
        }
        if kind == HamiltonianKind::QfEffective && !m.0.contains_key("driven") {
            m.set("driven", "all");
        }
        Some(m.device()?)
    } else {
        None
    };
    let h = build(kind, &lat, j, device.as_ref(), a.t)?;
    let config = json!({
        "command": "hamiltonian",
        "args": a,
        "resolved": {"kind": kind.name(), "lattice": lattice_json(&lat), "J": j, "t": a.t, "device": device},
    });
    let rows = h
        .sorted_labels()
        .into_iter()
        .map(|(l, c)| vec![l, num(c.re), num(c.im)])
        .collect();
    Ok(Report {
        config,
        body: json!({"hamiltonian": h, "terms": h.len()}),
        header: vec!["pattern".into(), "re".into(), "im".into()],
        rows,
    })
}

/// `count` points from `start` to `stop`, linearly or geometrically spaced.
pub fn sweep_points(range: &str, count: usize, log: bool) -> Result<Vec<f64>> {
    let (a, b) = range
        .split_once(':')
        .ok_or_else(|| Error::Params(format!("range {range:?} must be start:stop")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Params(format!("bad range bound {s:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if count == 0 {
        return Err(Error::Params("sweeps need at least one point".into()));
    }
    if log && !(a > 0.0 && b > 0.0) {
        return Err(Error::Params("geometric sweeps need positive bounds".into()));
    }
    if count == 1 {
        return Ok(vec![a]);
    }
    Ok((0..count)
        .map(|i| {
            let f = i as f64 / (count - 1) as f64;
            if log {
                (a.ln() + f * (b.ln() - a.ln())).exp()
            } else {
                a + f * (b - a)
            }
        })
        .collect())
}

/// Rescales the drive amplitudes and couplings of `p` to new uniform ratios.
fn with_ratios(p: &DeviceParams, g_over_delta: f64, omega_over_delta: f64) -> Result<DeviceParams> {
    let (g, d, om) = p.uniform()?;
    let mut q = p.clone();
    let sg = g_over_delta * d.abs() / g;
    let so = if om != 0.0 { omega_over_delta * d / om } else { 0.0 };
    q.g.iter_mut().for_each(|x| *x *= sg);
    q.drive.iter_mut().for_each(|x| *x *= so);
    q.validate()?;
    Ok(q)
}

fn frames_cmd(a: &FrameArgs, file: &ParamMap, from_file: bool, numerics: &Numerics) -> Result<Report> {
    let driven: Driven = a.driven.parse()?;
    let base = if from_file {
        let mut m = file.clone();
        if !m.0.contains_key("driven") {
            m.set("driven", &a.driven);
        }
        m.device()?
    } else {
        reference_device(a.g_over_delta, a.omega_over_delta)?
    };
    let (g, d, om) = base.uniform()?;
    let (g0, o0) = (g / d.abs(), om / d);
    let t_final = a.t.unwrap_or(20.0 * PI / d.abs());
    let mut opts = IntegratorOptions {
        integrator: match a.integrator {
            IntegratorArg::Midpoint => Integrator::Midpoint,
            IntegratorArg::Magnus4 => Integrator::Magnus4,
        },
        ..IntegratorOptions::default()
    };
    if let Some(tol) = file.get_f64("tol")? {
        opts.tol = tol;
    }
    if let Some(m) = file.get_usize("max_steps")? {
        opts.max_steps = m;
    }
    let points: Vec<(f64, f64)> = match a.sweep {
        None => vec![(g0, o0)],
        Some(axis) => {
            let lead = if axis == FrameSweep::GRatio { g0 } else { o0 };
            let values = match &a.range {
                Some(r) => sweep_points(r, a.points, a.log)?,
                // Successive halvings of the base ratio.
                None => (0..a.points.max(1)).map(|i| lead * 0.5f64.powi(i as i32)).collect(),
            };
            values
                .into_iter()
                .map(|v| match axis {
                    FrameSweep::OmegaRatio => (g0, v),
                    FrameSweep::GRatio => (v, o0),
                    FrameSweep::Both => (v * g0 / o0, v),
                })
                .collect()
        }
    };
    let dense = numerics.dense_limit;
    let results: Vec<Result<(crate::frames::FrameReport, f64)>> = points
        .par_iter()
        .map(|&(gr, or)| {
            let p = with_ratios(&base, gr, or)?;
            let r = verify_effective(&p, driven, t_final, !a.rwa, &opts, dense)?;
            let u = uqf_unitarity_defect(&p, 64)?;
            Ok((r, u))
        })
        .collect();
    let results: Vec<_> = results.into_iter().collect::<Result<_>>()?;
    let fit = if results.len() >= 2 {
        let xs: Vec<f64> = points
            .iter()
            .map(|&(g, o)| if a.sweep == Some(FrameSweep::GRatio) { g } else { o })
            .collect();
        let ys: Vec<f64> = results.iter().map(|(r, _)| r.distance).collect();
        fit_power_law(&xs, &ys).ok()
    } else {
        None
    };
    let config = json!({
        "command": "verify-frames",
        "args": a,
        "resolved": {"device": base, "t_final": t_final, "integrator": opts, "points": points},
    });
    let header = [
        "g_over_delta",
        "omega_over_delta",
        "t_final",
        "counter_rotating",
        "steps",
        "halving_change",
        "distance",
        "frame_identity_defect",
        "uqf_unitarity_defect",
    ];
    let rows = results
        .iter()
        .map(|(r, u)| {
            vec![
                num(r.g_over_delta),
                num(r.omega_over_delta),
                num(r.t_final),
                r.counter_rotating.to_string(),
                r.steps.to_string(),
                num(r.halving_change),
                num(r.distance),
                num(r.frame_identity_defect),
                num(*u),
            ]
        })
        .collect();
    let body_rows: Vec<Value> = results
        .iter()
        .map(|(r, u)| {
            let mut v = serde_json::to_value(r).unwrap_or(Value::Null);
            if let Value::Object(m) = &mut v {
                m.insert("uqf_unitarity_defect".into(), json!(u));
            }
            v
        })
        .collect();
    Ok(Report {
        config,
        body: json!({"results": body_rows, "fit_exponent": fit}),
        header: header.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

fn model_from(
    model: &str,
    lat: &LatticeArgs,
    j: Option<f64>,
    tau: Option<f64>,
    blocks: Option<usize>,
    file: &ParamMap,
) -> Result<TargetModel> {
    let kind: ModelKind = model.parse()?;
    let lattice = lattice_from(lat, file, kind == ModelKind::Xy2d)?;
    let j = pick(j, file, "J", 1.0)?;
    let tau = pick(tau, file, "tau", 0.1)?;
    let m = match blocks {
        Some(b) => b,
        None => file.get_usize("M")?.unwrap_or(1),
    };
    TargetModel::new(kind, lattice, j, tau, m)
}

/// Parses an observable name into a Pauli sum on `n` qubits.
pub fn parse_observable(spec: &str, n: usize) -> Result<PauliSum> {
    let s = spec.trim();
    let lower = s.to_ascii_lowercase();
    if lower == "sz-total" || lower == "sz_total" {
        let mut h = PauliSum::zero(n)?;
        for q in 0..n {
            h.add_real(PauliString::single(q, Pauli::Z), 0.5);
        }
        return Ok(h);
    }
    if let Some(p) = s.strip_prefix("pauli:") {
        let (m, pat) = PauliString::parse(p)?;
        if m != n {
            return Err(Error::SizeMismatch { left: m, right: n });
        }
        let mut h = PauliSum::zero(n)?;
        h.add_real(pat, 1.0);
        return Ok(h);
    }
    if let Some(k) = lower.strip_prefix('z') {
        let k: usize = k
            .parse()
            .map_err(|_| Error::Params(format!("unknown observable {spec:?}")))?;
        if k == 0 || k > n {
            return Err(Error::Params(format!("observable site {k} outside 1..={n}")));
        }
        let mut h = PauliSum::zero(n)?;
        h.add_real(PauliString::single(k - 1, Pauli::Z), 1.0);
        return Ok(h);
    }
    Err(Error::Params(format!("unknown observable {spec:?}")))
}

fn simulate_cmd(a: &SimArgs, file: &ParamMap, numerics: &Numerics) -> Result<Report> {
    let m = model_from(&a.model, &a.lattice, a.j, a.tau, a.blocks, file)?;
    let n = m.nqubits();
    let schedule = compile(&m, CompileOptions { fuse: a.fuse })?;
    let names: Vec<String> = if a.observable.is_empty() {
        vec!["sz-total".into()]
    } else {
        a.observable.clone()
    };
    let obs: Vec<(String, PauliSum)> = names
        .iter()
        .map(|o| Ok((o.clone(), parse_observable(o, n)?)))
        .collect::<Result<_>>()?;
    let bits = a.state.clone().unwrap_or_else(|| "0".repeat(n));
    if bits.len() != n {
        return Err(Error::SizeMismatch {
            left: bits.len(),
            right: n,
        });
    }
    let psi = StateVector::from_bitstring(&bits)?;
    let realistic = a.realistic.then(RealisticOptions::default);
    let sim = simulate(&schedule, &psi, &obs, realistic.as_ref(), numerics)?;
    let exact: Option<Vec<Vec<f64>>> = if a.exact {
        let times: Vec<f64> = sim.rows.iter().map(|r| r.time).collect();
        let h = m.target()?;
        let vals: Vec<Result<Vec<f64>>> = times
            .par_iter()
            .map(|&t| {
                let psi_t = crate::pauli::expm_multiply(&h, t, &psi)?;
                obs.iter().map(|(_, o)| Ok(psi_t.expectation(o)?.re)).collect()
            })
            .collect();
        Some(vals.into_iter().collect::<Result<_>>()?)
    } else {
        None
    };
    let mut header = vec!["block".to_string(), "time".into(), "norm".into()];
    header.extend(names.iter().cloned());
    if exact.is_some() {
        header.extend(names.iter().map(|s| format!("{s}_exact")));
    }
    let rows = sim
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = vec![r.block.to_string(), num(r.time), num(r.norm)];
            v.extend(r.values.iter().map(|&x| num(x)));
            if let Some(e) = &exact {
                v.extend(e[i].iter().map(|&x| num(x)));
            }
            v
        })
        .collect();
    let config = json!({
        "command": "simulate",
        "args": a,
        "resolved": {"model": m, "state": bits, "realistic": realistic},
    });
    Ok(Report {
        config,
        body: json!({"simulation": sim, "exact": exact}),
        header,
        rows,
    })
}

fn compile_cmd(a: &CompileArgs, file: &ParamMap) -> Result<Report> {
    let m = model_from(&a.model, &a.lattice, a.j, a.tau, a.blocks, file)?;
    let s = compile(&m, CompileOptions { fuse: a.fuse })?;
    let structure = match check_structure(&s) {
        Ok(seg) => json!({"ok": true, "segments": seg.len()}),
        Err(e) => json!({"ok": false, "message": e.to_string()}),
    };
    let n = m.nqubits();
    let mut rows = Vec::new();
    for (i, step) in s.block.iter().enumerate() {
        let row = match step {
            Step::Gate { layer } => vec![
                i.to_string(),
                "gate".into(),
                serde_json::to_value(layer.kind)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
                sites_text(&layer.support.sites(n)?),
                String::new(),
                String::new(),
            ],
            Step::Analog {
                duration,
                drive,
                hamiltonian,
            } => vec![
                i.to_string(),
                "analog".into(),
                format!("{} terms", hamiltonian.len()),
                String::new(),
                num(*duration),
                serde_json::to_value(drive.driven)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
            ],
            Step::Reconfigure { driven } => vec![
                i.to_string(),
                "reconfigure".into(),
                String::new(),
                String::new(),
                String::new(),
                serde_json::to_value(driven)?.as_str().unwrap_or_default().to_string(),
            ],
        };
        rows.push(row);
    }
    let config = json!({"command": "compile", "args": a, "resolved": {"model": m}});
    Ok(Report {
        config,
        body: json!({"schedule": s, "structure": structure}),
        header: ["index", "step", "gate", "sites", "duration", "driven"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    })
}

fn sites_text(s: &[usize]) -> String {
    s.iter().map(|q| (q + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn errors_cmd(a: &ErrArgs, file: &ParamMap, numerics: &Numerics) -> Result<Report> {
    let points: Vec<Option<f64>> = match (a.sweep, &a.range) {
        (None, _) => vec![None],
        (Some(_), None) => return Err(Error::Params("--sweep needs --range start:stop".into())),
        (Some(_), Some(r)) => sweep_points(r, a.points, false)?.into_iter().map(Some).collect(),
    };
    let reports: Vec<Result<ErrorReport>> = points.par_iter().map(|&v| error_point(a, file, numerics, v)).collect();
    let reports: Vec<ErrorReport> = reports.into_iter().collect::<Result<_>>()?;
    let sweep_col = a.sweep.is_some();
    let mut header = Vec::new();
    if sweep_col {
        header.push("point".to_string());
    }
    header.extend(
        ["name", "value", "analytic", "bound", "pass"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut rows = Vec::new();
    for (v, r) in points.iter().zip(&reports) {
        for e in &r.entries {
            let mut row = Vec::new();
            if let Some(v) = v {
                row.push(num(*v));
            }
            row.extend([
                e.name.clone(),
                num(e.value),
                opt(e.analytic),
                opt(e.bound),
                e.pass.map(|p| p.to_string()).unwrap_or_default(),
            ]);
            rows.push(row);
        }
    }
    let config = json!({"command": "errors", "args": a});
    let body = if sweep_col {
        json!({"points": points, "reports": reports})
    } else {
        json!({"report": reports[0]})
    };
    Ok(Report {
        config,
        body,
        header,
        rows,
    })
}

fn error_point(a: &ErrArgs, file: &ParamMap, numerics: &Numerics, point: Option<f64>) -> Result<ErrorReport> {
    let mut lat_args = LatticeArgs {
        n: a.lattice.n,
        nx: a.lattice.nx,
        ny: a.lattice.ny,
        boundary: a.lattice.boundary.clone(),
    };
    let mut t = a.t;
    let mut size = a.size;
    match (a.sweep, point) {
        (Some(ErrSweep::T), Some(v)) => t = Some(v),
        (Some(ErrSweep::N), Some(v)) => lat_args.n = Some(v.round() as usize),
        (Some(ErrSweep::Size), Some(v)) => size = Some(v.round() as usize),
        _ => {}
    }
    let j = pick(a.j, file, "J", 1.0)?;
    let device = || -> Result<DeviceParams> {
        let mut m = file.clone();
        let n = lat_args
            .n
            .or(file.get_usize("n")?)
            .ok_or_else(|| Error::Params("missing --n".into()))?;
        m.set("n", n);
        if let Some(b) = &lat_args.boundary {
            m.set("boundary", b);
        }
        m.set("g", pick(a.g, file, "g", 1.0)?);
        m.set("delta", pick(a.delta, file, "delta", 50.0)?);
        m.set("ratio", pick(a.ratio, file, "ratio", 1e-4)?);
        m.device()
    };
    match a.which {
        Which::Synthesis => {
            let model: SynthesisModel = a.model.as_deref().unwrap_or("control").parse()?;
            let p = device()?;
            let mut r = synthesis_norm(model, &p, t.unwrap_or(0.0))?;
            if let Some(k) = a.samples {
                let worst = synthesis_sweep(model, &p, k)?;
                r.push(crate::analysis::Entry::new(
                    "worst_deviation_over_period",
                    worst,
                    crate::analysis::Source::Computed,
                ));
            }
            Ok(r)
        }
        Which::Dyson => {
            let p = device()?;
            let (_, d, _) = p.uniform()?;
            dyson_propagator_diff(&p, t.unwrap_or(PI / d.abs()))
        }
        Which::Table1 => table1_check(&lattice_from(&lat_args, file, true)?),
        Which::Trotter => {
            let model: TrotterModel = a
                .model
                .as_deref()
                .ok_or_else(|| Error::Params("trotter needs --model xy2d_da|xy2d_digital|heis_da|heis_digital".into()))?
                .parse()?;
            let two_d = matches!(model, TrotterModel::Xy2dDa | TrotterModel::Xy2dDigital);
            let lat = lattice_from(&lat_args, file, two_d)?;
            Ok(trotter_commutator(model, &lat, j, numerics)?.1)
        }
        Which::Unitcell => unit_cell_report(j, numerics),
        Which::Bounds => {
            let model: BoundModel = a
                .model
                .as_deref()
                .ok_or_else(|| Error::Params("bounds needs --model".into()))?
                .parse()?;
            let size = size
                .or(lat_args.n)
                .ok_or_else(|| Error::Params("bounds needs --size".into()))?;
            Ok(bound_table(model, size, j, pick(a.g, file, "g", 1.0)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_resolution() {
        assert_eq!(resolve_output(Some("csv"), None).unwrap().format, Format::Csv);
        assert_eq!(resolve_output(None, None).unwrap().format, Format::Json);
        let o = resolve_output(Some("r.csv"), None).unwrap();
        assert_eq!(o.format, Format::Csv);
        assert!(o.path.is_some());
        assert!(resolve_output(Some("json"), Some(Format::Csv)).is_err());
    }

    #[test]
    fn sweep_spacing() {
        assert_eq!(sweep_points("0:1", 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
        let g = sweep_points("0.05:0.00625", 4, true).unwrap();
        assert!((g[1] - 0.025).abs() < 1e-15 && (g[3] - 0.00625).abs() < 1e-15);
        assert!(sweep_points("1", 3, false).is_err());
        assert!(sweep_points("0:1", 3, true).is_err());
    }

    #[test]
    fn observables() {
        let s = parse_observable("sz-total", 3).unwrap();
        assert_eq!(s.len(), 3);
        assert!(parse_observable("z4", 3).is_err());
        assert!(parse_observable("pauli:xzy", 3).is_ok());
        assert!(parse_observable("pauli:xz", 3).is_err());
        assert!(parse_observable("q", 3).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::DenseLimit { nqubits: 20, limit: 12 }), EXIT_RESOURCE);
        assert_eq!(
            exit_code(&Error::NoConvergence {
                what: "x",
                iterations: 1
            }),
            EXIT_COMPUTE
        );
        assert_eq!(exit_code(&Error::Params("x".into())), EXIT_USAGE);
        assert_eq!(main_with(["crda", "frobnicate"]), EXIT_USAGE);
    }
}
