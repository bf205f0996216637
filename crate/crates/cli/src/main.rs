//! `lmg`: reproducible data runs for the cavity-mediated LMG simulator.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lmg_core::device::Preset;
use lmg_core::hpboson::HpSolver;
use lmg_core::par::Exec;
use lmg_core::semiclassical::{GridAxis, SolveMode};

use config::{CommandName, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<lmg_core::Error> for CliError {
    fn from(e: lmg_core::Error) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "lmg", version, about = "Parameter maps, phase diagrams, squeezing and Dicke runs for the LMG model")]
struct Cli {
    /// TOML run configuration; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Data output file (stdout when omitted). A `.run.json` sidecar is written next to it.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Steady-state formulas for phase-sweep.
    #[arg(long, global = true, value_parser = ["paper", "oracle"])]
    mode: Option<String>,
    /// Bosonic solver for squeeze.
    #[arg(long, global = true, value_parser = ["moments", "fock"])]
    solver: Option<String>,
    /// Worker threads for grid runs; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the resolved configuration as TOML.
    #[arg(long, global = true, value_name = "PATH")]
    emit_config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Device parameters -> effective Raman parameters -> LMG parameters, as JSON.
    Params(ParamsArgs),
    /// Semiclassical steady states over a (lambda, rate) grid, as CSV.
    PhaseSweep(SweepArgs),
    /// Holstein-Primakoff squeezing trajectory, as CSV.
    Squeeze(SqueezeArgs),
    /// Exact Dicke-sector master equation, as CSV.
    EvolveDicke(DickeArgs),
}

#[derive(Args, Debug)]
struct ParamsArgs {
    #[arg(long, value_parser = ["two-axis", "isotropic", "one-axis"])]
    preset: Option<String>,
    /// Number of spins.
    #[arg(long = "n")]
    n_spins: Option<f64>,
    /// Cavity decay rate of both supermodes.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    gamma_dep: Option<f64>,
    /// Separation demanded by the regime checks.
    #[arg(long)]
    regime_factor: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    gamma_b: Option<f64>,
    #[arg(long)]
    gamma_dep: Option<f64>,
    #[arg(long)]
    lambda_start: Option<f64>,
    #[arg(long)]
    lambda_stop: Option<f64>,
    #[arg(long)]
    lambda_count: Option<usize>,
}

#[derive(Args, Debug)]
struct SqueezeArgs {
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Sets both collective rates.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gamma_a: Option<f64>,
    #[arg(long)]
    gamma_b: Option<f64>,
    #[arg(long)]
    gamma_dep: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Fock truncation for the fock solver.
    #[arg(long)]
    n_max: Option<usize>,
    /// Run all nine rate combinations of the squeezing figure.
    #[arg(long)]
    grid: bool,
    /// Spin number of an exact two-axis companion run.
    #[arg(long)]
    dicke_n: Option<usize>,
}

#[derive(Args, Debug)]
struct DickeArgs {
    /// Number of spins.
    #[arg(long = "n")]
    n_spins: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long)]
    gamma_a: Option<f64>,
    #[arg(long)]
    gamma_b: Option<f64>,
    #[arg(long)]
    gamma_dep: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn command_name(c: &Command) -> CommandName {
    match c {
        Command::Params(_) => CommandName::Params,
        Command::PhaseSweep(_) => CommandName::PhaseSweep,
        Command::Squeeze(_) => CommandName::Squeeze,
        Command::EvolveDicke(_) => CommandName::EvolveDicke,
    }
}

/// Merges the config file, defaults and flags into one resolved config.
fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let name = command_name(&cli.command);
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(name),
    };
    if cfg.command != name {
        return Err(CliError::Config(format!(
            "config is for `{}` but `{}` was requested",
            cfg.command.name(),
            name.name()
        )));
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    let parse_err = |e: lmg_core::Error| CliError::Config(e.to_string());
    match &cli.command {
        Command::Params(a) => {
            let mut job = cfg.params.take().unwrap_or_default();
            if let Some(p) = &a.preset {
                job.preset = Some(p.parse::<Preset>().map_err(parse_err)?);
            }
            set(&mut job.n_spins, a.n_spins);
            set(&mut job.kappa, a.kappa);
            set(&mut job.gamma_dep, a.gamma_dep);
            set(&mut job.regime_factor, a.regime_factor);
            cfg.params = Some(job);
        }
        Command::PhaseSweep(a) => {
            let mut job = cfg.phase_sweep.take().unwrap_or_default();
            if let Some(m) = &cli.mode {
                job.mode = m.parse::<SolveMode>().map_err(parse_err)?;
            }
            set(&mut job.h, a.h);
            set(&mut job.gamma_b, a.gamma_b);
            set(&mut job.gamma_dep, a.gamma_dep);
            let l = job.lambda;
            job.lambda = GridAxis::new(
                a.lambda_start.unwrap_or(l.start),
                a.lambda_stop.unwrap_or(l.stop),
                a.lambda_count.unwrap_or(l.count),
            );
            cfg.phase_sweep = Some(job);
        }
        Command::Squeeze(a) => {
            let mut job = cfg.squeeze.take().unwrap_or_default();
            if let Some(s) = &cli.solver {
                job.solver = s.parse::<HpSolver>().map_err(parse_err)?;
            }
            set(&mut job.h, a.h);
            set(&mut job.lambda, a.lambda);
            set(&mut job.gamma_a, a.gamma);
            set(&mut job.gamma_b, a.gamma);
            set(&mut job.gamma_a, a.gamma_a);
            set(&mut job.gamma_b, a.gamma_b);
            set(&mut job.gamma_dep, a.gamma_dep);
            set(&mut job.t_end, a.t_end);
            set(&mut job.dt, a.dt);
            set(&mut job.samples, a.samples);
            set(&mut job.n_max, a.n_max);
            job.grid |= a.grid;
            if a.dicke_n.is_some() {
                job.dicke_n = a.dicke_n;
            }
            cfg.squeeze = Some(job);
        }
        Command::EvolveDicke(a) => {
            let mut job = cfg.evolve_dicke.take().unwrap_or_default();
            set(&mut job.n_spins, a.n_spins);
            set(&mut job.h, a.h);
            set(&mut job.lambda, a.lambda);
            set(&mut job.chi, a.chi);
            set(&mut job.gamma_a, a.gamma_a);
            set(&mut job.gamma_b, a.gamma_b);
            set(&mut job.gamma_dep, a.gamma_dep);
            set(&mut job.theta, a.theta);
            set(&mut job.phi, a.phi);
            set(&mut job.t_end, a.t_end);
            set(&mut job.dt, a.dt);
            set(&mut job.samples, a.samples);
            cfg.evolve_dicke = Some(job);
        }
    }
    Ok(cfg)
}

/// Returns the executor and the thread count recorded in the sidecar.
fn executor(threads: Option<usize>) -> Result<(Exec, usize), CliError> {
    match threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(1) => Ok((Exec::Sequential, 1)),
        #[cfg(feature = "parallel")]
        Some(k) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            Ok((Exec::Parallel, k))
        }
        #[cfg(feature = "parallel")]
        None => Ok((Exec::Parallel, rayon::current_num_threads())),
        #[cfg(not(feature = "parallel"))]
        _ => Ok((Exec::Sequential, 1)),
    }
}

fn dispatch(cfg: &RunConfig, exec: Exec) -> Result<commands::Output, CliError> {
    let missing = || CliError::Config(format!("no [{}] section", cfg.command.name()));
    match cfg.command {
        CommandName::Params => commands::params(cfg.params.as_ref().ok_or_else(missing)?),
        CommandName::PhaseSweep => commands::phase_sweep(cfg.phase_sweep.as_ref().ok_or_else(missing)?, exec),
        CommandName::Squeeze => commands::squeeze(cfg.squeeze.as_ref().ok_or_else(missing)?, exec),
        CommandName::EvolveDicke => commands::evolve_dicke(cfg.evolve_dicke.as_ref().ok_or_else(missing)?),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve(cli)?;
    let (exec, threads) = executor(cli.threads)?;
    if let Some(p) = &cli.emit_config {
        output::write_atomic(p, cfg.to_toml().as_bytes())?;
    }
    let result = dispatch(&cfg, exec)?;
    match &cfg.out {
        Some(out) => {
            output::write_atomic(out, result.data.as_bytes())?;
            for (suffix, contents) in &result.companions {
                output::write_atomic(&output::companion_path(out, suffix), contents.as_bytes())?;
            }
            output::write_sidecar(out, &cfg, threads, &result.summary)?;
        }
        None => {
            if !result.companions.is_empty() {
                return Err(CliError::Config("companion runs need --out".into()));
            }
            print!("{}", result.data);
        }
    }
    eprintln!("{}", serde_json::to_string(&result.summary).expect("json"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lmg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
