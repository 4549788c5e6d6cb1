use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbayes::experiments::{run_classical, run_fig2, run_retrodict, run_verify_scaled, write_fig2_csv, Fig2Config};
use qbayes::optimizer::OptimizerConfig;
use qbayes::Error;

#[derive(Parser)]
#[command(name = "qbayes", version, about = "Fidelity-optimal quantum retrodiction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the partial-swap example over the prior weight p and write CSV.
    Fig2 {
        #[arg(long, default_value_t = std::f64::consts::PI / 8.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.95)]
        xi0: f64,
        #[arg(long, default_value_t = 0.001)]
        p_min: f64,
        #[arg(long, default_value_t = 0.999)]
        p_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Also run the numerical optimizer on every row.
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `key = value` optimizer options file.
        #[arg(long)]
        optimizer_options: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the optimal reverse channel for QCHAN/QMAT inputs.
    Retrodict {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the property suite on seeded random instances.
    Verify {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Multiply every threshold by this factor (0 forces failures).
        #[arg(long, default_value_t = 1.0, hide = true)]
        tolerance_scale: f64,
    },
    /// Bayes posterior and Jeffrey update from CSV tables.
    Classical {
        #[arg(long)]
        likelihood: PathBuf,
        #[arg(long)]
        prior: PathBuf,
        #[arg(long)]
        evidence: PathBuf,
    },
}

enum Failure {
    Verification(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fig2 {
            theta,
            xi0,
            p_min,
            p_max,
            steps,
            numeric,
            seed,
            optimizer_options,
            out,
        } => {
            let optimizer = match optimizer_options {
                Some(path) => OptimizerConfig::from_options_file(path)?,
                None => OptimizerConfig::default(),
            };
            let config = Fig2Config {
                theta,
                xi0,
                p_min,
                p_max,
                steps,
                include_numeric: numeric,
                seed,
                optimizer,
            };
            let rows = run_fig2(&config)?;
            write_fig2_csv(&rows, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            let bad = rows.iter().filter(|r| r.f_petz > r.f_opt + 1e-10).count();
            if bad > 0 {
                return Err(Failure::Verification(format!("{bad} rows with f_petz > f_opt")));
            }
        }
        Command::Retrodict {
            channel,
            gamma,
            tau,
            out,
            report,
        } => {
            let rep = run_retrodict(&channel, &gamma, &tau, &out, report.as_deref())?;
            print!("{rep}");
        }
        Command::Verify {
            dim,
            trials,
            seed,
            tolerance_scale,
        } => {
            let summary = run_verify_scaled(dim, trials, seed, tolerance_scale)?;
            println!("{summary}");
            if !summary.all_passed() {
                return Err(Failure::Verification("property failures".into()));
            }
        }
        Command::Classical {
            likelihood,
            prior,
            evidence,
        } => {
            let rep = run_classical(&likelihood, &prior, &evidence)?;
            print!("{}", rep.to_csv()?);
            if !rep.agrees() {
                return Err(Failure::Verification(format!(
                    "quantum route disagrees by {:e}",
                    rep.discrepancy
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
