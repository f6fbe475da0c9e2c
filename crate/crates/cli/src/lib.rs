//! Command-line front end for the `vbq` solver.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use vbq_core::convergence::{regime_matrix, sweep_epsilon, ConvergenceReport, PairConfig, RegimeCell};
use vbq_core::io::{make_initial_data, JsonLine, SolverConfig};
use vbq_core::oracle::oracle_agreement;
use vbq_core::runner::run_config;
use vbq_core::timestepper::{stable_dt, StepMode};
use vbq_core::Error;

/// Exit statuses, one per failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const RUNTIME: i32 = 4;
    pub const PRECONDITION: i32 = 5;
    pub const FORMAT: i32 = 6;
    pub const IO: i32 = 7;
    /// A verification command ran to completion but its check failed.
    pub const CHECK: i32 = 8;
}

pub const ORACLE_TOLERANCE: f64 = 1e-12;
pub const SWEEP_REPORT: &str = "sweep.ndjson";
pub const REGIMES_REPORT: &str = "regimes.ndjson";

#[derive(Debug, Parser)]
#[command(name = "vbq", version, about = "Pseudo-spectral Voigt-Boussinesq solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one configuration.
    Run {
        #[command(flatten)]
        common: Common,
        /// Restart from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Compare Voigt runs against the unregularized reference for each epsilon.
    Sweep(Common),
    /// Integrate every (alpha, beta) cell at eps = 1.
    Regimes(Common),
    /// Check the dealiased flux against the direct convolution.
    OracleCheck {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Echo a configuration and the quantities derived from it.
    Info {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to `output.dir` from the config, then `./out`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Overrides the seed of random initial data.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<(SolverConfig, PathBuf), Error> {
        let cfg = load_config(&self.config, self.seed)?;
        let out = self
            .output
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok((cfg, out))
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SolverConfig, Error> {
    let cfg = SolverConfig::from_path(path)?.with_seed(seed);
    cfg.validate()?;
    Ok(cfg)
}

enum Outcome {
    Ok,
    CheckFailed(String),
}

/// Parses `args` (program name first), runs the command and returns the exit status.
/// Results go to `stdout`; failures print one `error class=...` line to `stderr`.
pub fn dispatch<I, S, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return exit::OK;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "error class=usage message={:?}", first);
            return exit::USAGE;
        }
    };
    match execute(cli.command, stdout) {
        Ok(Outcome::Ok) => exit::OK,
        Ok(Outcome::CheckFailed(msg)) => {
            let _ = writeln!(stderr, "error class=check message={msg:?}");
            exit::CHECK
        }
        Err(e) => {
            let key = match &e {
                Error::Config { key, .. } => format!(" key={key}"),
                _ => String::new(),
            };
            let _ = writeln!(stderr, "error class={}{key} message={:?}", e.class(), e.to_string());
            match e.class() {
                "config" => exit::CONFIG,
                "runtime" => exit::RUNTIME,
                "precondition" => exit::PRECONDITION,
                "format" => exit::FORMAT,
                _ => exit::IO,
            }
        }
    }
}

fn execute<W: Write>(command: Command, out: &mut W) -> Result<Outcome, Error> {
    match command {
        Command::Run { common, resume } => {
            let (cfg, dir) = common.load()?;
            let s = run_config(&cfg, &dir, resume.as_deref())?;
            let r = &s.final_record;
            writeln!(
                out,
                "run complete t={} records={} bkm_integral={:.6e} diagnostics={} checkpoint={}",
                r.t,
                s.records,
                r.bkm_integral,
                s.diagnostics_path.display(),
                s.checkpoint_path.display()
            )?;
            Ok(Outcome::Ok)
        }
        Command::Sweep(common) => {
            let (cfg, dir) = common.load()?;
            let pair = pair_config(&cfg)?;
            let grid = cfg.grid::<f64>()?;
            let state0 = make_initial_data(&cfg.initial, &grid)?;
            let report = sweep_epsilon(&state0, &pair, &cfg.sweep.epsilons, common.workers)?;
            fs::create_dir_all(&dir)?;
            let path = dir.join(SWEEP_REPORT);
            fs::write(&path, sweep_lines(&report)?)?;
            for (eps, e) in report.epsilons.iter().zip(&report.e_max) {
                writeln!(out, "eps={eps:e} e_max={e:.6e}")?;
            }
            let verdict = match report.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "n/a",
            };
            writeln!(
                out,
                "mean_rate={} tail_ratio={:.3e} verdict={verdict} report={}",
                report.mean_rate.map_or("n/a".into(), |m| format!("{m:.4}")),
                report.tail_ratio,
                path.display()
            )?;
            Ok(Outcome::Ok)
        }
        Command::Regimes(common) => {
            let (cfg, dir) = common.load()?;
            let grid = cfg.grid::<f64>()?;
            let state0 = make_initial_data(&cfg.initial, &grid)?;
            let mut control = cfg.control::<f64>()?;
            control.cadence = cfg.cadence();
            let cells: Vec<(f64, f64)> = cfg.regimes.cells.iter().map(|c| (c[0], c[1])).collect();
            let result = regime_matrix(&state0, &control, &cells, cfg.regimes.sobolev_s, common.workers)?;
            fs::create_dir_all(&dir)?;
            let path = dir.join(REGIMES_REPORT);
            let mut text = String::new();
            for cell in &result {
                text.push_str(&regime_line(cell)?);
                text.push('\n');
                writeln!(
                    out,
                    "alpha={} beta={} label={} completed={} bkm={:.6e}",
                    cell.alpha,
                    cell.beta,
                    cell.label.as_str(),
                    cell.completed,
                    cell.bkm_value
                )?;
            }
            fs::write(&path, text)?;
            writeln!(out, "report={}", path.display())?;
            Ok(Outcome::Ok)
        }
        Command::OracleCheck { n, cases, seed } => {
            let r = oracle_agreement(n, cases, seed)?;
            writeln!(
                out,
                "oracle n={} cases={} max_error={:.3e} max_zero_mode={:.3e} tolerance={:e}",
                r.n, r.cases, r.max_error, r.max_zero_mode, ORACLE_TOLERANCE
            )?;
            if r.max_error < ORACLE_TOLERANCE {
                Ok(Outcome::Ok)
            } else {
                Ok(Outcome::CheckFailed(format!(
                    "max_error {:e} exceeds {:e}",
                    r.max_error, ORACLE_TOLERANCE
                )))
            }
        }
        Command::Info { config, seed } => {
            let cfg = load_config(&config, seed)?;
            let grid = cfg.grid::<f64>()?;
            let params = cfg.params::<f64>()?;
            let control = cfg.control::<f64>()?;
            let dt = match control.mode {
                StepMode::Fixed { dt } => dt,
                StepMode::Cfl { cfl } => {
                    let s0 = make_initial_data(&cfg.initial, &grid)?;
                    stable_dt(&s0, cfl)?.min(control.dt_max)
                }
            };
            writeln!(out, "N={}", grid.n())?;
            writeln!(out, "epsilon={}", params.epsilon)?;
            writeln!(out, "alpha={}", params.alpha)?;
            writeln!(out, "beta={}", params.beta)?;
            writeln!(out, "dt={dt:e}")?;
            writeln!(out, "t_end={}", control.t_end)?;
            writeln!(out, "dealias_cutoff={}", grid.cutoff())?;
            writeln!(out, "retained_modes={}", grid.retained_modes())?;
            writeln!(out, "dx={:e}", grid.dx())?;
            writeln!(out, "--- config ---")?;
            write!(out, "{}", cfg.to_toml_string())?;
            Ok(Outcome::Ok)
        }
    }
}

fn pair_config(cfg: &SolverConfig) -> Result<PairConfig, Error> {
    let dt = match cfg.control::<f64>()?.mode {
        StepMode::Fixed { dt } => dt,
        StepMode::Cfl { .. } => {
            return Err(Error::Config {
                key: "time.mode".into(),
                message: "sweeps need a shared fixed step; set mode = \"fixed\"".into(),
            })
        }
    };
    if cfg.output.every_time.is_some() {
        return Err(Error::Config {
            key: "output.every_time".into(),
            message: "sweeps sample every_steps only".into(),
        });
    }
    Ok(PairConfig {
        dt,
        t_end: cfg.time.t_end,
        output_every: cfg.output.every_steps.unwrap_or(vbq_core::io::config::DEFAULT_EVERY_STEPS),
    })
}

fn sweep_lines(r: &ConvergenceReport) -> Result<String, Error> {
    let mut text = String::new();
    for s in &r.series {
        let line = JsonLine::new()
            .string("kind", "pair")
            .real("epsilon", s.epsilon)?
            .real("e_max", s.e_max())?
            .real("metric_max", s.metric_max())?
            .reals("t", &s.times)?
            .reals("energy", &s.energy)?
            .reals("velocity_l2", &s.velocity_l2)?
            .reals("theta_l2", &s.theta_l2)?
            .finish();
        text.push_str(&line);
        text.push('\n');
    }
    let mut summary = JsonLine::new()
        .string("kind", "summary")
        .reals("epsilons", &r.epsilons)?
        .reals("e_max", &r.e_max)?
        .reals("rates", &r.rates)?
        .reals("metric_max", &r.metric_max)?
        .opt_real("mean_rate", r.mean_rate)?
        .real("tail_ratio", r.tail_ratio)?
        .boolean("e_max_decreasing", r.e_max_decreasing)
        .boolean("metric_decreasing", r.metric_decreasing);
    summary = match r.pass {
        Some(p) => summary.boolean("pass", p),
        None => summary.string("pass", "skipped"),
    };
    text.push_str(&summary.finish());
    text.push('\n');
    Ok(text)
}

fn regime_line(c: &RegimeCell) -> Result<String, Error> {
    let finite = |x: f64| x.is_finite().then_some(x);
    let mut line = JsonLine::new()
        .real("alpha", c.alpha)?
        .real("beta", c.beta)?
        .string("label", c.label.as_str())
        .boolean("completed", c.completed)
        .opt_real("bkm_value", finite(c.bkm_value))?
        .opt_real("max_hs_omega", finite(c.max_hs_omega))?
        .opt_real("abort_time", c.abort_time)?;
    if let Some(reason) = &c.abort_reason {
        line = line.string("abort_reason", reason);
    }
    Ok(line.finish())
}
