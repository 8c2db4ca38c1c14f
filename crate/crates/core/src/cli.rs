//! Command-line driver: `reduce`, `run2d`, `run3d` and `converge`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn, LevelFilter};
use serde::Serialize;

use crate::config::{parse_config, RunConfig};
use crate::elasto3d::{self, averages, build_initial_data, run_slab, SlabRunOptions};
use crate::error::{Error, Result};
use crate::harness::{report_json, run_ladder, write_table};
use crate::material::{Hypotheses, MaterialModel};
use crate::plate2d::{self, ExactMode, PlateRunOptions, PlateSolver};
use crate::reduction::reduce;

#[derive(Debug, Parser)]
#[command(name = "vonkarman", version, about = "Thin-plate limits of nonlinear elastodynamics")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Only report errors.
    #[arg(long, short, global = true, conflicts_with = "verbose")]
    quiet: bool,
    /// Log progress and diagnostics.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the plate tensor L2 of a material as JSON.
    Reduce(ReduceArgs),
    /// Integrate the 2D plate equations and write an energy series.
    Run2d(RunArgs),
    /// Integrate the 3D slab and write an energy series and averaged fields.
    Run3d(Run3dArgs),
    /// Run an h-ladder and write the convergence report.
    Converge(ConvergeArgs),
}

#[derive(Debug, Args)]
struct ReduceArgs {
    /// Configuration file with a `material` section.
    #[arg(long, conflicts_with_all = ["mu", "lambda", "kappa"])]
    config: Option<PathBuf>,
    /// Saint Venant-Kirchhoff shear modulus.
    #[arg(long, requires = "lambda", allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Saint Venant-Kirchhoff first Lame parameter.
    #[arg(long, requires = "mu", allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Modulus of the squared distance to SO(3).
    #[arg(long, conflicts_with_all = ["mu", "lambda"], allow_negative_numbers = true)]
    kappa: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Series CSV; defaults to `outputs.series`, then standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Run3dArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot JSON of the averaged fields at `slab.field_times`.
    #[arg(long)]
    fields: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report JSON; defaults to `outputs.report`, then standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-h metric table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the exit status.
///
/// Status 0 is success, 1 a failed run or failed convergence checks, 2 a usage error.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging(cli.quiet, cli.verbose);
    let outcome = match &cli.command {
        Command::Reduce(a) => cmd_reduce(a).map(|()| true),
        Command::Run2d(a) => cmd_run2d(a).map(|()| true),
        Command::Run3d(a) => cmd_run3d(a).map(|()| true),
        Command::Converge(a) => cmd_converge(a, cli.quiet),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn init_logging(quiet: bool, verbose: bool) {
    let level = if quiet {
        LevelFilter::Error
    } else if verbose {
        LevelFilter::Debug
    } else {
        LevelFilter::Warn
    };
    // a second initialisation (repeated dispatch in one process) keeps the first logger
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    log::set_max_level(level);
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config(&text)
}

fn output(cli: Option<&PathBuf>, configured: Option<&String>) -> Result<Box<dyn Write>> {
    match cli.cloned().or_else(|| configured.map(PathBuf::from)) {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(&p)?))),
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

#[derive(Serialize)]
struct ReduceOutput {
    material: MaterialModel,
    hypotheses: Hypotheses,
    /// Voigt `(11, 22, 12)` with engineering shear.
    #[serde(rename = "L2")]
    l2: [[f64; 3]; 3],
    mu: f64,
    lambda_star: f64,
}

fn cmd_reduce(a: &ReduceArgs) -> Result<()> {
    let material = match (&a.config, a.mu, a.lambda, a.kappa) {
        (Some(path), ..) => load(path)?.material,
        (None, Some(mu), Some(lambda), None) => MaterialModel::svk(mu, lambda)?,
        (None, None, None, Some(kappa)) => MaterialModel::dist_so3(kappa)?,
        _ => return Err(Error::Config(vec!["reduce needs --config, --mu with --lambda, or --kappa".into()])),
    };
    let l2 = reduce(&material.tangent_at_identity())?;
    let m = l2.matrix();
    let out = ReduceOutput {
        material,
        hypotheses: material.hypotheses(),
        l2: [0, 1, 2].map(|r| [0, 1, 2].map(|c| m[(r, c)])),
        mu: m[(2, 2)],
        lambda_star: m[(0, 1)],
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn cmd_run2d(a: &RunArgs) -> Result<()> {
    let cfg = load(&a.config)?;
    let grid = cfg.grid2()?;
    let time = cfg.time()?;
    let l2 = reduce(&cfg.material.tangent_at_identity())?;
    let mut solver = PlateSolver::new(grid, l2, cfg.plate.regime);
    solver.damping = cfg.plate.damping;
    if !(cfg.initial.u1.is_zero() && cfg.initial.u2.is_zero()) {
        warn!("initial.u1/u2 are ignored in 2D: the in-plane displacement follows from v");
    }
    let v0 = cfg.initial.v0.sample(&grid)?;
    let p0 = cfg.initial.vhat0.sample(&grid)?;
    let initial = solver.initial_state(&v0, &p0)?;
    let exact = match &cfg.plate.exact {
        Some(e) => Some(ExactMode { shape: e.shape.sample(&grid)?, omega: e.omega }),
        None => None,
    };
    let opts = PlateRunOptions {
        dt: time.dt.unwrap_or(f64::MAX),
        t_end: time.t_end,
        sample_every: cfg.plate.sample_every,
        keep_states: false,
        exact,
    };
    let run = solver.run(&initial, &cfg.forcing, &opts)?;
    info!("run2d: {} steps of {:e}", run.step.steps, run.step.used);
    let mut out = output(a.out.as_ref(), cfg.outputs.series.as_ref())?;
    plate2d::write_series(&mut out, &run.samples)?;
    out.flush()?;
    if let Some(err) = run.samples.last().and_then(|s| s.error_l2) {
        info!("final L2 error {err:e}");
    }
    Ok(())
}

#[derive(Serialize)]
struct FieldSnapshot {
    requested_t: f64,
    t: f64,
    u1: Vec<f64>,
    u2: Vec<f64>,
    v: Vec<f64>,
    dv: Vec<f64>,
}

#[derive(Serialize)]
struct FieldsFile {
    h: f64,
    alpha: f64,
    half_width: f64,
    n1: usize,
    n2: usize,
    /// Node `(i, j)` is entry `i + n1 j`.
    snapshots: Vec<FieldSnapshot>,
}

fn cmd_run3d(a: &Run3dArgs) -> Result<()> {
    let cfg = load(&a.config)?;
    let slab = cfg.slab.clone().ok_or_else(|| Error::Config(vec!["slab is required for run3d".into()]))?;
    let grid = cfg.grid3()?;
    let time = cfg.time()?;
    if slab.h >= 0.5 {
        warn!("h = {} is outside the thin-plate regime", slab.h);
    }
    let initial = build_initial_data(&cfg.initial, slab.h, slab.alpha, grid, &cfg.material)?;
    let opts = SlabRunOptions {
        dt: time.dt.unwrap_or(f64::INFINITY),
        t_end: time.t_end,
        c_safe: slab.c_safe,
        samples: slab.samples,
        ..SlabRunOptions::default()
    };
    let interval = time.t_end / slab.samples as f64;
    let mut wanted: Vec<(f64, usize)> = Vec::new();
    for &t in &slab.field_times {
        if !(0.0..=time.t_end).contains(&t) {
            return Err(Error::Config(vec![format!("slab.field_times entry {t} lies outside [0, T]")]));
        }
        let idx = (t / interval).round() as usize;
        if (idx as f64 * interval - t).abs() > 1e-9 * time.t_end {
            warn!("field time {t} is not a sample time; using {}", idx as f64 * interval);
        }
        wanted.push((t, idx));
    }
    let mut snapshots = Vec::new();
    let run = run_slab(&initial, &cfg.material, &cfg.forcing, &opts, |s, sample| {
        let idx = (sample.t / interval).round() as usize;
        for &(requested_t, _) in wanted.iter().filter(|w| w.1 == idx) {
            let av = averages(s);
            snapshots.push(FieldSnapshot { requested_t, t: s.t, u1: av.u1, u2: av.u2, v: av.v, dv: av.dv });
        }
        Ok(())
    })?;
    info!("run3d: {} steps of {:e}", run.step.steps, run.step.used);
    let mut out = output(a.out.as_ref(), cfg.outputs.series.as_ref())?;
    elasto3d::integrator::write_series(&mut out, &run.samples)?;
    out.flush()?;
    if let Some(path) = a.fields.clone().or_else(|| cfg.outputs.fields.as_ref().map(PathBuf::from)) {
        let file = FieldsFile {
            h: slab.h,
            alpha: slab.alpha,
            half_width: grid.half_width,
            n1: grid.n1,
            n2: grid.n2,
            snapshots,
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_converge(a: &ConvergeArgs, quiet: bool) -> Result<bool> {
    let cfg = load(&a.config)?;
    let ladder = cfg.ladder_config()?;
    let report = run_ladder(&ladder)?;
    let mut out = output(a.out.as_ref(), cfg.outputs.report.as_ref())?;
    out.write_all(report_json(&report)?.as_bytes())?;
    out.flush()?;
    if let Some(path) = a.csv.clone().or_else(|| cfg.outputs.table.as_ref().map(PathBuf::from)) {
        let mut table = BufWriter::new(File::create(path)?);
        write_table(&mut table, &report)?;
        table.flush()?;
    }
    for c in report.checks.iter().filter(|_| !quiet) {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        let value = c.value.map(|v| format!("{v:.4e}")).unwrap_or_else(|| "n/a".into());
        eprintln!("{verdict:4} {:<26} {value:>12} (threshold {:.4e})", c.name, c.threshold);
    }
    Ok(report.passed())
}
