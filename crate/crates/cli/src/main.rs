use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cfield_cli::checks::run_checks;
use cfield_cli::config::{worker_count, ConfigError, RunConfig};
use cfield_cli::pipeline::{
    field_mu, ideal_reference, mean_field, provenance, sweep, write_sweep, zero_temperature, zero_temperature_table,
    RunError,
};
use cfield_cli::table::ResultTable;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cfield", version, about = "Classical-field Monte Carlo for a trapped 1D Bose gas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one temperature and write every table, including T = 0 profiles.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        chains: Option<usize>,
    },
    /// Sample a list of temperatures and write per-temperature and summary tables.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated temperatures; overrides `sweep.temperatures`.
        #[arg(long, value_delimiter = ',')]
        temps: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and classical ideal-gas distributions of the excited number.
    IdealRef {
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        temp: f64,
        #[arg(long)]
        cutoff: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Imaginary-time ground state.
    Gpe {
        #[arg(long)]
        atoms: f64,
        #[arg(long)]
        coupling: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Built-in invariant and oracle checks.
    Check {
        #[arg(long)]
        fast: bool,
    },
}

fn load(path: &Path) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path)?;
    Ok(RunConfig::parse(&text)?)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn execute(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run { config, out, seed, chains } => {
            let mut cfg = load(&config)?;
            cfg.temperatures.clear();
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(c) = chains {
                cfg.chains = c;
            }
            cfg.validate()?;
            let workers = worker_count()?;
            let mu = field_mu(&mean_field(&cfg)?);
            let zero = zero_temperature(&cfg, mu)?;
            let mut paths = vec![zero_temperature_table(&cfg, &zero).write(&cfg.out_dir)?];
            if cfg.temperature > 0.0 {
                paths.extend(write_sweep(&cfg, &sweep(&cfg, workers)?)?);
            }
            report(&paths);
        }
        Command::Sweep { config, temps, out } => {
            let mut cfg = load(&config)?;
            if let Some(t) = temps {
                cfg.temperatures = t;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            cfg.validate()?;
            if cfg.temperatures.len() < 2 {
                return Err(ConfigError::Invalid("a sweep needs at least two temperatures".into()).into());
            }
            let workers = worker_count()?;
            report(&write_sweep(&cfg, &sweep(&cfg, workers)?)?);
        }
        Command::IdealRef { atoms, temp, cutoff, out } => {
            if atoms == 0 || !(temp > 0.0) || cutoff == 0 {
                return Err(ConfigError::Invalid("need atoms >= 1, temp > 0, cutoff >= 1".into()).into());
            }
            report(&[ideal_reference(atoms, temp, cutoff)?.write(&out)?]);
        }
        Command::Gpe { atoms, coupling, out } => {
            let cfg = RunConfig { atoms, coupling, ..RunConfig::default() };
            cfg.validate()?;
            let gs = mean_field(&cfg)?;
            let mut t = ResultTable::new("gpe_ground_state", &[("x", "a_ho"), ("psi", "a_ho^-1/2"), ("density", "1/a_ho")]);
            provenance(&mut t, &cfg);
            t.note("mu", gs.mu);
            t.note("mu_above_zero_point", gs.mu_above_zero_point());
            t.note("energy", gs.energy);
            t.note("iterations", gs.iterations);
            for (x, p) in gs.grid.points().iter().zip(&gs.psi) {
                t.push(vec![*x, *p, p * p]);
            }
            report(&[t.write(&out)?]);
        }
        Command::Check { fast } => {
            let results = run_checks(fast);
            let mut failed = Vec::new();
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                if !c.passed {
                    failed.push(c.name);
                }
            }
            if !failed.is_empty() {
                return Err(RunError::Invariant(format!("checks failed: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let diag = serde_json::json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
            eprintln!("{diag}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
