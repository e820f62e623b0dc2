//! Command-line front end: `ryddephase <subcommand> --config <path> ...`.
//!
//! Every data file is written next to a `<file>.manifest.json` holding the
//! effective configuration, its SHA-256, the seed and realization streams,
//! the crate version and the wall-clock time. Data files depend only on the
//! configuration and seed, never on the thread count.

pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::correlation::{g2_trace, multi_cycle_trace, oracle_case, G2Trace};
use crate::error::{Error, Result};
use crate::phasematch::{collinear, solve_offaxis, BeamSign, PhaseMatchResult};
use crate::protocol::{decay_reference, entangle_trace, write_entangle_csv};
use config::{parse_config, read_config_value, set_dotted, OutputFormat, RunConfig};

pub const THREADS_ENV: &str = "RYDDEPHASE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ryddephase", version, about = "Rydberg spin-wave dephasing: g2 traces, multi-cycle decay, entanglement, phase matching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// g2 versus free interval, one trace per target level.
    G2Trace(CommonArgs),
    /// g2 after each cycle of a multi-cycle schedule, with exp(-T/tau) reference.
    Cycles(CommonArgs),
    /// Two-spin-wave projection fidelity versus interval.
    Entangle(CommonArgs),
    /// Collinear and off-axis wavevector mismatch.
    Phasematch(CommonArgs),
    /// Large-N g2 assembly against the brute-force correlator.
    Oracle(CommonArgs),
    /// Cartesian parameter sweep over another subcommand.
    Sweep(CommonArgs),
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`; default `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `ensemble.seed` and `oracle.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (also `RYDDEPHASE_THREADS`); defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Overwrite existing outputs.
    #[arg(long)]
    pub force: bool,
}

impl Command {
    pub fn split(&self) -> (Task, &CommonArgs) {
        match self {
            Command::G2Trace(a) => (Task::G2Trace, a),
            Command::Cycles(a) => (Task::Cycles, a),
            Command::Entangle(a) => (Task::Entangle, a),
            Command::Phasematch(a) => (Task::Phasematch, a),
            Command::Oracle(a) => (Task::Oracle, a),
            Command::Sweep(a) => (Task::Sweep, a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    G2Trace,
    Cycles,
    Entangle,
    Phasematch,
    Oracle,
    Sweep,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::G2Trace => "g2-trace",
            Task::Cycles => "cycles",
            Task::Entangle => "entangle",
            Task::Phasematch => "phasematch",
            Task::Oracle => "oracle",
            Task::Sweep => "sweep",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g2-trace" => Task::G2Trace,
            "cycles" => Task::Cycles,
            "entangle" => Task::Entangle,
            "phasematch" => Task::Phasematch,
            "oracle" => Task::Oracle,
            "sweep" => Task::Sweep,
            other => return Err(Error::Config { path: "sweep.command".into(), message: format!("unknown subcommand `{other}`") }),
        })
    }
}

/// Parses `argv`, runs, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (task, args) = cli.command.split();
    match run(task, args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one subcommand and returns the data files written.
pub fn run(task: Task, args: &CommonArgs) -> Result<Vec<PathBuf>> {
    let mut value = read_config_value(&args.config)?;
    if let Some(seed) = args.seed {
        for section in ["ensemble", "oracle"] {
            if value.get(section).is_some() {
                set_dotted(&mut value, &format!("{section}.seed"), seed.into())?;
            }
        }
    }
    let threads = resolve_threads(args.threads, std::env::var(THREADS_ENV).ok().as_deref())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config { path: "--threads".into(), message: e.to_string() })?;
    let ctx = RunContext { config_path: args.config.clone(), out: args.out.clone(), force: args.force };
    pool.install(|| execute(task, &value, &ctx))
}

/// `--threads` wins over the environment; `None` means rayon's default.
pub fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>> {
    let bad = |message: String| Error::Config { path: "--threads".into(), message };
    let threads = match (flag, env) {
        (Some(n), _) => Some(n),
        (None, Some(text)) if !text.trim().is_empty() => {
            Some(text.trim().parse().map_err(|_| bad(format!("{THREADS_ENV}=`{text}` is not a thread count")))?)
        }
        _ => None,
    };
    if threads == Some(0) {
        return Err(bad("thread count must be >= 1".into()));
    }
    Ok(threads)
}

struct RunContext {
    config_path: PathBuf,
    out: Option<PathBuf>,
    force: bool,
}

/// A data file waiting to be written, with what its manifest should record.
struct Artifact {
    name: String,
    bytes: Vec<u8>,
    seed: Option<u64>,
    realizations: Option<usize>,
}

fn execute(task: Task, value: &serde_json::Value, ctx: &RunContext) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let config = parse_config(value)?;
    let dir = ctx.out.clone().or_else(|| config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    if task == Task::Sweep {
        return run_sweep(value, &config, &dir, ctx);
    }
    let (artifacts, after) = compute(task, &config)?;
    let written = write_artifacts(task, value, &dir, ctx, &artifacts, started)?;
    after.map_or(Ok(written), Err)
}

/// Produces the artifacts of a subcommand. A failure discovered after the
/// artifacts exist (an oracle bound violation) is returned alongside them so
/// the report still lands on disk.
fn compute(task: Task, config: &RunConfig) -> Result<(Vec<Artifact>, Option<Error>)> {
    let json = config.output.format == OutputFormat::Json;
    let ext = if json { "json" } else { "csv" };
    let mut artifacts = Vec::new();
    let mut deferred = None;
    match task {
        Task::G2Trace => {
            let ensemble = config.ensemble()?;
            let grid = config.grid_values()?;
            for &n in config.targets()? {
                let schedule = config.schedule_for(n)?;
                let trace = g2_trace(&ensemble, &schedule, &grid, config.mode, config.realizations)?;
                artifacts.push(Artifact {
                    name: format!("g2_trace_n{n}.{ext}"),
                    bytes: trace_bytes(&trace, json, None)?,
                    seed: Some(ensemble.seed),
                    realizations: Some(config.realizations),
                });
            }
        }
        Task::Cycles => {
            let ensemble = config.ensemble()?;
            config.require_intervals()?;
            for &n in config.targets()? {
                let schedule = config.schedule_for(n)?;
                let tau = schedule.cycles()[0].duration();
                let trace = multi_cycle_trace(&ensemble, &schedule, config.mode, config.realizations)?;
                artifacts.push(Artifact {
                    name: format!("cycles_n{n}.{ext}"),
                    bytes: trace_bytes(&trace, json, Some(tau))?,
                    seed: Some(ensemble.seed),
                    realizations: Some(config.realizations),
                });
            }
        }
        Task::Entangle => {
            let ensemble = config.ensemble()?;
            let grid = config.grid_values()?;
            let spec = config.entangle_spec()?;
            let points = entangle_trace(&ensemble, &spec, &grid, config.realizations)?;
            let bytes = if json {
                serde_json::to_vec_pretty(&points)?
            } else {
                let mut buf = Vec::new();
                write_entangle_csv(&points, &mut buf)?;
                buf
            };
            artifacts.push(Artifact {
                name: format!("entangle.{ext}"),
                bytes,
                seed: Some(ensemble.seed),
                realizations: Some(config.realizations),
            });
        }
        Task::Phasematch => {
            let pm = config.phasematch()?;
            let beams = collinear(&pm.wavelengths_nm, &pm.signs)?;
            let straight = PhaseMatchResult::from_beams(&beams, &vec![0.0; beams.len()], pm.speed_m_per_s)?;
            artifacts.push(json_artifact("phasematch_collinear.json", &straight.to_json())?);
            if let (Ok(w), Ok(s)) = (<[f64; 4]>::try_from(pm.wavelengths_nm.as_slice()), <[BeamSign; 4]>::try_from(pm.signs.as_slice())) {
                let sol = solve_offaxis(w, s)?;
                let tilted = PhaseMatchResult::from_beams(&sol.beams, &sol.angles, pm.speed_m_per_s)?;
                artifacts.push(json_artifact("phasematch_offaxis.json", &tilted.to_json())?);
            }
        }
        Task::Oracle => {
            let oracle = config.oracle()?;
            let cases = oracle
                .n_atoms
                .iter()
                .map(|&n| oracle_case(n, oracle.amplitude_sets, oracle.seed, oracle.box_side_um))
                .collect::<Result<Vec<_>>>()?;
            deferred = cases.iter().find(|c| !c.passed()).map(|c| Error::OracleMismatch {
                n_atoms: c.n_atoms,
                deviation: c.max_rel_dev,
                bound: c.bound,
            });
            let report = serde_json::json!({
                "cases": cases.iter().map(|c| serde_json::json!({
                    "n_atoms": c.n_atoms,
                    "amplitude_sets": c.amplitude_sets,
                    "max_rel_dev": c.max_rel_dev,
                    "mean_rel_dev": c.mean_rel_dev,
                    "bound": c.bound,
                    "pass": c.passed(),
                })).collect::<Vec<_>>(),
            });
            let mut artifact = json_artifact("oracle.json", &report)?;
            artifact.seed = Some(oracle.seed);
            artifact.realizations = Some(oracle.amplitude_sets);
            artifacts.push(artifact);
        }
        Task::Sweep => unreachable!("handled by run_sweep"),
    }
    Ok((artifacts, deferred))
}

fn json_artifact(name: &str, value: &serde_json::Value) -> Result<Artifact> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(Artifact { name: name.into(), bytes, seed: None, realizations: None })
}

fn trace_bytes(trace: &G2Trace, json: bool, tau: Option<f64>) -> Result<Vec<u8>> {
    if json {
        let mut value = trace.to_json();
        if let Some(tau) = tau {
            value["tau_us"] = tau.into();
            value["decay_reference"] = trace.grid.iter().map(|&t| decay_reference(tau, t)).collect::<Vec<_>>().into();
        }
        let mut bytes = serde_json::to_vec_pretty(&value)?;
        bytes.push(b'\n');
        return Ok(bytes);
    }
    let mut buf = Vec::new();
    match tau {
        None => trace.write_csv(&mut buf)?,
        Some(tau) => {
            use std::io::Write;
            writeln!(buf, "t_us,g2_mean,g2_stderr,f_mean,h_mean,n_realizations,decay_reference")?;
            for s in &trace.summary {
                writeln!(
                    buf,
                    "{},{},{},{},{},{},{}",
                    s.time,
                    s.g2_mean,
                    s.g2_stderr,
                    s.f_mean,
                    s.h_mean,
                    s.n_realizations,
                    decay_reference(tau, s.time)
                )?;
            }
        }
    }
    Ok(buf)
}

fn manifest_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    data.with_file_name(name)
}

pub fn config_hash(value: &serde_json::Value) -> String {
    let canonical = serde_json::to_vec(value).expect("JSON values always serialize");
    hex::encode(Sha256::digest(&canonical))
}

/// Checks every target before touching the disk, then writes data files and
/// manifests in a fixed order from this thread only.
fn write_artifacts(
    task: Task,
    value: &serde_json::Value,
    dir: &Path,
    ctx: &RunContext,
    artifacts: &[Artifact],
    started: Instant,
) -> Result<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = artifacts.iter().map(|a| dir.join(&a.name)).collect();
    if !ctx.force {
        for path in &paths {
            for p in [path.clone(), manifest_path(path)] {
                if p.exists() {
                    return Err(Error::OutputExists(p));
                }
            }
        }
    }
    std::fs::create_dir_all(dir)?;
    let hash = config_hash(value);
    let wall_clock = started.elapsed().as_secs_f64();
    for (artifact, path) in artifacts.iter().zip(&paths) {
        std::fs::write(path, &artifact.bytes)?;
        let manifest = serde_json::json!({
            "output": artifact.name,
            "subcommand": task.to_string(),
            "version": env!("CARGO_PKG_VERSION"),
            "config_path": ctx.config_path.display().to_string(),
            "config_sha256": hash,
            "seed": artifact.seed,
            "realization_streams": artifact.realizations.map(|m| [0, m]),
            "wall_clock_s": wall_clock,
            "config": value,
        });
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        std::fs::write(manifest_path(path), bytes)?;
    }
    Ok(paths)
}

/// Cartesian product of the sweep axes in key order; the last key varies fastest.
fn sweep_points(parameters: &std::collections::BTreeMap<String, Vec<serde_json::Value>>) -> Vec<Vec<(String, serde_json::Value)>> {
    parameters.iter().fold(vec![Vec::new()], |acc, (key, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut point = prefix.clone();
                    point.push((key.clone(), v.clone()));
                    point
                })
            })
            .collect()
    })
}

fn run_sweep(value: &serde_json::Value, config: &RunConfig, dir: &Path, ctx: &RunContext) -> Result<Vec<PathBuf>> {
    let sweep = config.sweep()?;
    let task: Task = sweep.command.parse()?;
    if task == Task::Sweep {
        return Err(Error::Config { path: "sweep.command".into(), message: "sweeps cannot nest".into() });
    }
    if sweep.parameters.is_empty() || sweep.parameters.values().any(|v| v.is_empty()) {
        return Err(Error::Config { path: "sweep.parameters".into(), message: "need at least one value per parameter".into() });
    }
    let points = sweep_points(&sweep.parameters);

    let mut index = String::from("point");
    for key in sweep.parameters.keys() {
        index.push(',');
        index.push_str(key);
    }
    index.push('\n');

    let mut written = Vec::new();
    for (k, point) in points.iter().enumerate() {
        let mut child = value.clone();
        if let Some(map) = child.as_object_mut() {
            map.remove("sweep");
        }
        for (key, v) in point {
            set_dotted(&mut child, key, v.clone())?;
        }
        let sub = RunContext { config_path: ctx.config_path.clone(), out: Some(dir.join(format!("point_{k:04}"))), force: ctx.force };
        written.extend(execute(task, &child, &sub)?);
        index.push_str(&k.to_string());
        for (_, v) in point {
            index.push(',');
            index.push_str(&v.to_string());
        }
        index.push('\n');
    }
    let artifact = Artifact { name: "sweep_index.csv".into(), bytes: index.into_bytes(), seed: None, realizations: None };
    written.extend(write_artifacts(Task::Sweep, value, dir, ctx, &[artifact], Instant::now())?);
    Ok(written)
}
