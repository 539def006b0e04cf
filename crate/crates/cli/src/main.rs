//! `insarfopt`: solve, sweep, grid-search and compare two-UAV InSAR formations.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when the scenario has
//! no feasible formation.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod report;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use insarfopt_core::metrics::metrics;
use insarfopt_core::oracle::{dump_feasible_csv, grid_search_mode, Axis};
use insarfopt_core::sca::{run, InitialPoint};
use insarfopt_core::units::parse_quantity;
use insarfopt_core::{GridSpec, Mode, Position, SCAConfig, ScenarioConfig, SweepParam};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "insarfopt",
    version,
    about = "Formation and communication power optimizer for two-UAV bistatic InSAR"
)]
struct Cli {
    /// Worker threads for sweeps and grid searches (default: all cores).
    #[arg(long, env = "INSARFOPT_JOBS", global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize one scenario and write run_report.json, trace.csv and schedules.csv.
    Solve(SolveArgs),
    /// Solve a scenario over a list of parameter values and write sweep.csv.
    Sweep(SweepArgs),
    /// Exhaustive grid search; writes oracle.json.
    Oracle(OracleArgs),
    /// Tabulate and compare run_report.json files.
    Report(ReportArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    scenario: PathBuf,

    /// Override a scenario field, e.g. `--set comm.p_com_max="10 dBm"`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

impl ScenarioArgs {
    fn load(&self) -> insarfopt_core::Result<ScenarioConfig> {
        ScenarioConfig::load_with_overrides(&self.scenario, &self.overrides)
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Relative objective change at which iterations stop.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,

    /// Inner SCA iteration cap.
    #[arg(long, default_value_t = 50)]
    max_iters: usize,

    /// Outer alternation cap.
    #[arg(long, default_value_t = 20)]
    max_outer: usize,
}

impl SolverArgs {
    fn config(&self) -> anyhow::Result<SCAConfig> {
        if !(self.epsilon > 0.0) || self.max_iters == 0 || self.max_outer == 0 {
            bail!("--epsilon must be positive and the iteration caps nonzero");
        }
        Ok(SCAConfig {
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            max_outer: self.max_outer,
            ..SCAConfig::default()
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    /// proposed, benchmark1 (vertical formation) or benchmark2 (equal power).
    #[arg(long, default_value = "proposed")]
    mode: Mode,

    /// Starting master altitude in meters.
    #[arg(long, requires = "init_z2")]
    init_z1: Option<f64>,

    /// Starting slave ground range in meters (ignored by benchmark1).
    #[arg(long, requires = "init_z1", allow_negative_numbers = true)]
    init_x2: Option<f64>,

    /// Starting slave altitude in meters.
    #[arg(long, requires = "init_z1")]
    init_z2: Option<f64>,

    #[command(flatten)]
    solver: SolverArgs,

    /// Output directory.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

/// One column of a sweep: a solver mode or the grid oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
enum RunMode {
    Solver(Mode),
    Oracle,
}

impl FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "oracle" {
            return Ok(RunMode::Oracle);
        }
        Mode::from_str(s)
            .map(RunMode::Solver)
            .map_err(|_| format!("unknown mode `{s}` (expected proposed, benchmark1, benchmark2 or oracle)"))
    }
}

impl RunMode {
    fn name(self) -> &'static str {
        match self {
            RunMode::Solver(m) => m.name(),
            RunMode::Oracle => "oracle",
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    /// p_com_max, h_amb_max, gamma_snr_min or gamma_rg_min.
    #[arg(long)]
    param: SweepParam,

    /// Comma-separated values; units are allowed, e.g. `10 dBm,1 W`.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,

    /// Comma-separated run modes.
    #[arg(long, value_delimiter = ',', default_value = "proposed")]
    modes: Vec<RunMode>,

    /// Grid spacing in meters for oracle rows.
    #[arg(long, default_value_t = 1.0)]
    grid_step: f64,

    #[command(flatten)]
    solver: SolverArgs,

    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    #[arg(long, default_value = "proposed")]
    mode: Mode,

    /// Spacing of the default grid in meters.
    #[arg(long, default_value_t = 1.0)]
    step: f64,

    /// Master altitude axis as `lo:hi:step`, replacing the default.
    #[arg(long, value_name = "LO:HI:STEP", value_parser = parse_axis, allow_hyphen_values = true)]
    z1: Option<Axis>,

    /// Slave ground range axis as `lo:hi:step`.
    #[arg(long, value_name = "LO:HI:STEP", value_parser = parse_axis, allow_hyphen_values = true)]
    x2: Option<Axis>,

    /// Slave altitude axis as `lo:hi:step`.
    #[arg(long, value_name = "LO:HI:STEP", value_parser = parse_axis, allow_hyphen_values = true)]
    z2: Option<Axis>,

    /// Also write every feasible grid point to feasible.csv.
    #[arg(long)]
    dump_feasible: bool,

    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// run_report.json files to compare.
    #[arg(required = true)]
    reports: Vec<PathBuf>,

    /// Directory for report.csv (and deltas.csv with two or more reports).
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

fn parse_axis(text: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("`{text}` is not lo:hi:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    Ok(Axis::new(num(lo)?, num(hi)?, num(step)?))
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = match error.downcast_ref::<insarfopt_core::Error>() {
            Some(insarfopt_core::Error::Infeasible(_)) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.jobs.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not size the worker pool: {e}");
        }
    }
    let res = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => report::cmd_report(&a.reports, &a.out),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn create_out_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush().with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_solve(a: &SolveArgs) -> CmdResult {
    let s = a.scenario.load()?;
    let cfg = a.solver.config()?;
    let init = a.init_z1.map(|z1| InitialPoint {
        z1,
        q2: Position::new(a.init_x2.unwrap_or(s.mission.target_x), a.init_z2.unwrap_or(z1)),
    });
    let r = run(&s, init, &cfg, a.mode)?;
    if !r.converged {
        warn!("run stopped at the outer iteration cap without converging; results are the last iterate");
    }

    create_out_dir(&a.out)?;
    let path = a.out.join("run_report.json");
    let mut w = create(&path)?;
    w.write_all(r.to_json().as_bytes())?;
    w.flush()?;
    r.write_trace_csv(create(&a.out.join("trace.csv"))?)?;
    r.write_schedules_csv(&s, create(&a.out.join("schedules.csv"))?)?;

    println!(
        "{}: coverage {:.2} m², b_perp {:.4} m, h_amb {:.4} m, {} outer iterations{}",
        r.mode.name(),
        r.coverage_m2,
        r.b_perp_m,
        r.h_amb_m,
        r.outer_iterations,
        if r.converged { "" } else { " (not converged)" }
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    value: f64,
    mode: &'static str,
    coverage_m2: Option<f64>,
    b_perp_m: Option<f64>,
    h_amb_m: Option<f64>,
    converged: bool,
}

fn sweep_point(base: &ScenarioConfig, a: &SweepArgs, cfg: &SCAConfig, value: f64, mode: RunMode) -> SweepRow {
    let mut row = SweepRow {
        value,
        mode: mode.name(),
        coverage_m2: None,
        b_perp_m: None,
        h_amb_m: None,
        converged: false,
    };
    let s = match base.with_param(a.param, value) {
        Ok(s) => s,
        Err(e) => {
            warn!("{} = {value}: {e}", a.param.name());
            return row;
        }
    };
    match mode {
        RunMode::Solver(m) => match run(&s, None, cfg, m) {
            Ok(r) => {
                row.coverage_m2 = Some(r.coverage_m2);
                row.b_perp_m = Some(r.b_perp_m);
                row.h_amb_m = Some(r.h_amb_m);
                row.converged = r.converged;
            }
            Err(e) => warn!("{} = {value}, {}: {e}", a.param.name(), m.name()),
        },
        RunMode::Oracle => match grid_search_mode(&s, &GridSpec::uniform(&s, a.grid_step), Mode::Proposed) {
            Ok(res) => match res.best {
                Some(b) => {
                    let m = metrics(&b.formation, &s);
                    row.coverage_m2 = Some(b.coverage_m2);
                    row.b_perp_m = Some(m.b_perp);
                    row.h_amb_m = Some(m.h_amb);
                    row.converged = true;
                }
                None => warn!("{} = {value}, oracle: no feasible grid point", a.param.name()),
            },
            Err(e) => warn!("{} = {value}, oracle: {e}", a.param.name()),
        },
    }
    row
}

fn cmd_sweep(a: &SweepArgs) -> CmdResult {
    let s = a.scenario.load()?;
    let cfg = a.solver.config()?;
    if a.modes.is_empty() {
        return Err(anyhow::anyhow!("--modes is empty").into());
    }
    if !(a.grid_step > 0.0) {
        return Err(anyhow::anyhow!("--grid-step must be positive").into());
    }
    let dim = a.param.dimension();
    let values = a
        .values
        .iter()
        .map(|v| parse_quantity(v, dim).map_err(|e| anyhow::anyhow!("--values: {e}")))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    create_out_dir(&a.out)?;

    let jobs: Vec<(f64, RunMode)> = values
        .iter()
        .flat_map(|&v| a.modes.iter().map(move |&m| (v, m)))
        .collect();
    info!("sweeping {} over {} points", a.param.name(), jobs.len());
    // par_iter keeps input order in the collected rows
    let rows: Vec<SweepRow> = jobs.par_iter().map(|&(v, m)| sweep_point(&s, a, &cfg, v, m)).collect();

    let path = a.out.join("sweep.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| r.coverage_m2.is_none()).count();
    println!(
        "wrote {} rows to {} ({failed} without a solution)",
        rows.len(),
        path.display()
    );
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> CmdResult {
    let s = a.scenario.load()?;
    let mut g = GridSpec::uniform(&s, a.step);
    if let Some(ax) = a.z1 {
        g.z1 = ax;
    }
    if let Some(ax) = a.x2 {
        g.x2 = ax;
    }
    if let Some(ax) = a.z2 {
        g.z2 = ax;
    }
    let res = grid_search_mode(&s, &g, a.mode)?;
    create_out_dir(&a.out)?;
    write_json(&a.out.join("oracle.json"), &res)?;
    if a.dump_feasible {
        let rows = dump_feasible_csv(&s, &g, a.mode, create(&a.out.join("feasible.csv"))?)?;
        info!("dumped {rows} feasible points");
    }
    match &res.best {
        Some(b) => {
            println!(
                "best coverage {:.2} m² at z1 = {}, x2 = {}, z2 = {} ({} of {} points feasible)",
                b.coverage_m2, b.formation.q1.z, b.formation.q2.x, b.formation.q2.z, res.feasible, res.evaluated
            );
            Ok(())
        }
        None => {
            Err(insarfopt_core::Error::Infeasible(format!("no feasible grid point among {}", res.evaluated)).into())
        }
    }
}
