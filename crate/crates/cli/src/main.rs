use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mwave::error::ConfigViolation;
use mwave::harness::{self, ScenarioConfig};
use mwave::Error;

/// Mother-waveform experiments: BER and rate curves, sensing sweeps,
/// self-checks and resource maps.
#[derive(Parser)]
#[command(name = "mwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bit-error rate versus SNR for every configured scheme.
    Ber(Common),
    /// Closed-form rate curves over the SNR grid.
    Rate(Common),
    /// Range and velocity RMSE versus SNR; optionally dumps range-Doppler maps.
    Sensing {
        #[command(flatten)]
        common: Common,
        /// Range-Doppler map CSV of the designated trial.
        #[arg(long)]
        maps: Option<PathBuf>,
    },
    /// Transform, synthesis, sparsity, precoding and isolation self-checks.
    Verify(Common),
    /// Ownership of lattice bins, time blocks and time-frequency bins.
    Occupancy(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV; the scenario's `output` or stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        let violations: Vec<ConfigViolation> = cfg.check();
        if !violations.is_empty() {
            return Err(Error::Config {
                path: self.config.clone(),
                violations,
            });
        }
        Ok(cfg)
    }

    fn out_path(&self, cfg: &ScenarioConfig) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| cfg.output.as_ref().map(PathBuf::from))
    }
}

fn write_records(records: &[harness::ResultRecord], path: Option<&Path>) -> Result<(), Error> {
    match path {
        Some(p) => harness::emit_csv(records, p),
        None => harness::records::write_csv(records, std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Ber(c) => {
            let cfg = c.load()?;
            let records = harness::with_threads(c.threads, || harness::run_ber(&cfg))??;
            write_records(&records, c.out_path(&cfg).as_deref())?;
        }
        Command::Rate(c) => {
            let cfg = c.load()?;
            write_records(&harness::run_rate(&cfg)?, c.out_path(&cfg).as_deref())?;
        }
        Command::Sensing { common: c, maps } => {
            let cfg = c.load()?;
            let out = harness::with_threads(c.threads, || harness::run_sensing(&cfg))??;
            write_records(&out.records, c.out_path(&cfg).as_deref())?;
            if let Some(p) = maps {
                harness::write_maps(&out.maps, &cfg, &p)?;
            }
        }
        Command::Verify(c) => {
            let cfg = c.load()?;
            let results = harness::run_verify(cfg.m, cfg.n, &cfg.channel, cfg.seed)?;
            let mut stdout = std::io::stdout().lock();
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(stdout, "{tag} {}: {}", r.name, r.detail);
            }
            let passed = results.iter().filter(|r| r.passed).count();
            let _ = writeln!(stdout, "{passed}/{} checks passed", results.len());
            return Ok(passed == results.len());
        }
        Command::Occupancy(c) => {
            let cfg = c.load()?;
            let rows = harness::occupancy_rows(&cfg)?;
            match c.out_path(&cfg) {
                Some(p) => harness::write_occupancy(&rows, &p)?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    let _ = writeln!(stdout, "grid,row,col,owner");
                    for (g, r, col, o) in rows {
                        let _ = writeln!(stdout, "{g},{r},{col},{o}");
                    }
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() {
                2
            } else if matches!(e, Error::Numerical(_)) {
                3
            } else {
                1
            })
        }
    }
}
