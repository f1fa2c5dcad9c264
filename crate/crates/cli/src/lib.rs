//! Command-line front end: `run`, `sweep` and `verify`.
//!
//! Exit codes: 0 success, 1 numerical or acceptance failure, 2 usage or
//! config error. Data files are computed in full before any is written, so
//! a failing invocation leaves no partial output behind.

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{Experiment, ExperimentConfig};
use error::{CliError, CliResult};
use output::{Artifacts, Format, Manifest};

#[derive(Debug, Parser)]
#[command(
    name = "thermolimit",
    version,
    about = "Thermodynamic-limit and spin-bath experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Experiment config file (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// RNG seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Data file format.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=1024))]
    pub jobs: Option<u32>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Overrides {
    /// Number of spins.
    #[arg(long)]
    pub n: Option<usize>,
    /// Spin-bath coupling.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Boson truncation dimension.
    #[arg(long)]
    pub fock_dim: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment.
    Run {
        /// Experiment to run; optional when --config names one.
        #[arg(value_enum)]
        experiment: Option<Experiment>,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment over the cross product of parameter ranges.
    Sweep {
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        /// Boson truncation dimension for the spin-boson checks.
        #[arg(long)]
        fock_dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Run {
            experiment,
            overrides,
            common,
        } => {
            let cfg = resolve(experiment, &overrides, &common, false)?;
            let format = common.format.or(cfg.format).unwrap_or_default();
            let started = (SystemTime::now(), Instant::now());
            let artifacts = experiments::run(&cfg, format)?;
            let dir = out_dir(&common, &cfg, cfg.experiment.name());
            finish(&artifacts, &dir, "run", &cfg, format, started)
        }
        Command::Sweep { overrides, common } => {
            if common.config.is_none() {
                return Err(CliError::Usage("sweep needs --config with `ranges`".into()));
            }
            let cfg = resolve(None, &overrides, &common, true)?;
            let format = common.format.or(cfg.format).unwrap_or_default();
            let jobs = common
                .jobs
                .map(|j| j as usize)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let started = (SystemTime::now(), Instant::now());
            let artifacts = sweep::sweep(&cfg, format, jobs)?;
            let dir = out_dir(&common, &cfg, &format!("{}_sweep", cfg.experiment.name()));
            finish(&artifacts, &dir, "sweep", &cfg, format, started)
        }
        Command::Verify { fock_dim, common } => verify(fock_dim, &common),
    }
}

fn verify(fock_dim: Option<usize>, common: &Common) -> CliResult<()> {
    if common.config.is_some() {
        return Err(CliError::Usage("verify takes no --config".into()));
    }
    let opts = acceptance::Options {
        seed: common.seed.unwrap_or(config::DEFAULT_SEED),
        fock_dim,
    };
    let started = (SystemTime::now(), Instant::now());
    let mut results = Vec::new();
    for id in acceptance::criterion_ids() {
        let r = acceptance::run_criterion(id, &opts).expect("listed criterion");
        println!("{}", r.line());
        if let acceptance::Status::Error(name) = &r.status {
            eprintln!("criterion {id}: {name}");
        }
        results.push(r);
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );

    if let Some(dir) = &common.out {
        let format = common.format.unwrap_or_default();
        let mut artifacts = Artifacts::new();
        artifacts.add_table("acceptance", &acceptance::results_table(&results), format);
        let manifest = Manifest {
            command: "verify".into(),
            config: json!({ "seed": opts.seed, "fock_dim": opts.fock_dim, "format": format }),
            started: started.0,
            wall_time: started.1.elapsed(),
        };
        artifacts.write(dir, &manifest)?;
    }
    if failed > 0 {
        return Err(CliError::AcceptanceFailed { failed });
    }
    Ok(())
}

/// Config file (or built-in default) with command-line overrides applied.
fn resolve(
    experiment: Option<Experiment>,
    overrides: &Overrides,
    common: &Common,
    sweeping: bool,
) -> CliResult<ExperimentConfig> {
    let mut cfg = match (&common.config, experiment) {
        (Some(path), named) => {
            let cfg = ExperimentConfig::load(path)?;
            if let Some(e) = named.filter(|&e| e != cfg.experiment) {
                return Err(CliError::Usage(format!(
                    "command line names {} but the config is for {}",
                    e.name(),
                    cfg.experiment.name()
                )));
            }
            cfg
        }
        (None, Some(e)) => ExperimentConfig::default_for(e),
        (None, None) => {
            return Err(CliError::Usage(
                "run needs an experiment name or --config".into(),
            ))
        }
    };
    if !sweeping && !cfg.ranges.is_empty() {
        return Err(CliError::Usage(
            "config has `ranges`; use the sweep command".into(),
        ));
    }
    if let Some(seed) = common.seed {
        cfg.seed = Some(seed);
    }
    let e = cfg.experiment;
    let reject = |flag: &str| {
        Err(CliError::Usage(format!(
            "{flag} does not apply to experiment {}",
            e.name()
        )))
    };
    if let Some(n) = overrides.n {
        match e {
            Experiment::Spinboson | Experiment::Zurek => cfg.set_parameter("n_spins", json!(n))?,
            _ => return reject("--n"),
        }
    }
    if let Some(l) = overrides.lambda {
        match e {
            Experiment::Zurek => cfg.set_parameter("lambda", json!(l))?,
            _ => return reject("--lambda"),
        }
    }
    if let Some(m) = overrides.fock_dim {
        match e {
            Experiment::Spinboson => cfg.set_parameter("fock_dim", json!(m))?,
            _ => return reject("--fock-dim"),
        }
    }
    if let Some(f) = common.format {
        cfg.format = Some(f);
    }
    if !sweeping {
        cfg.validate()?;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: &ExperimentConfig, default_leaf: &str) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.output_path.clone())
        .unwrap_or_else(|| Path::new("results").join(default_leaf))
}

fn finish(
    artifacts: &Artifacts,
    dir: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    format: Format,
    started: (SystemTime, Instant),
) -> CliResult<()> {
    let mut resolved = cfg.clone();
    resolved.format = Some(format);
    resolved.output_path = Some(dir.to_path_buf());
    let manifest = Manifest {
        command: command.into(),
        config: serde_json::to_value(&resolved).expect("serializable config"),
        started: started.0,
        wall_time: started.1.elapsed(),
    };
    artifacts.write(dir, &manifest)?;
    for name in artifacts.names() {
        println!("{}", dir.join(name).display());
    }
    Ok(())
}
