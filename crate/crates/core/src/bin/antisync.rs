use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};

use antisync_core::cli::{
    parse_config, run_bounds, run_simulate, run_sweep, run_verify, write_sweep_csv, CliError, ExitStatus,
};
use antisync_core::{Mode, Scheme};

/// Gain criteria, certified settling times and simulation for master/slave
/// complex-valued networks under anti-synchronization control.
#[derive(Parser)]
#[command(name = "antisync", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the gains against the criteria and print the certificate.
    Verify {
        config: PathBuf,
        #[arg(long)]
        mode: Option<Mode>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check user-chosen epsilon and rho and compute T1 / T2 from them.
    Bounds {
        config: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate master and slave and write the trajectory CSV.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        scheme: Option<Scheme>,
    },
    /// Scale mu and rho of the gains over a grid and simulate each point.
    Sweep {
        config: PathBuf,
        /// Comma-separated factors, e.g. `1,0.1,0.01,0`.
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_report(json: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitStatus, CliError> {
    match cli.command {
        Command::Verify { config, mode, out } => {
            let s = parse_config(&config)?;
            let (report, status) = run_verify(&s, mode)?;
            write_report(&report.to_json(), out.as_ref())?;
            eprint!("{}", report.summary());
            Ok(status)
        }
        Command::Bounds {
            config,
            epsilon,
            rho,
            mode,
            out,
        } => {
            let s = parse_config(&config)?;
            let (report, status) = run_bounds(&s, mode, epsilon, rho)?;
            write_report(&report.to_json(), out.as_ref())?;
            eprint!("{}", report.summary());
            Ok(status)
        }
        Command::Simulate {
            config,
            out,
            dt,
            t_end,
            scheme,
        } => {
            let mut s = parse_config(&config)?;
            if let Some(dt) = dt {
                s.sim.dt = dt;
            }
            if let Some(t_end) = t_end {
                s.sim.t_end = t_end;
            }
            if let Some(scheme) = scheme {
                s.sim.scheme = scheme;
            }
            let file = BufWriter::new(File::create(&out)?);
            let (_, summary) = run_simulate(&s, file)?;
            eprintln!("{}", summary.describe());
            Ok(ExitStatus::Success)
        }
        Command::Sweep { config, scales, out } => {
            let s = parse_config(&config)?;
            let rows = run_sweep(&s, &scales)?;
            write_sweep_csv(&rows, BufWriter::new(File::create(&out)?))?;
            for r in &rows {
                eprintln!(
                    "scale {:<8} admissible {:<5} settling {:<10} {}",
                    r.scale,
                    r.admissible,
                    r.settling_time.map_or("-".into(), |t| format!("{t:.3}")),
                    r.status
                );
            }
            Ok(ExitStatus::Success)
        }
    }
}

fn main() {
    let status = match run(Cli::parse()) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_status()
        }
    };
    exit(status.code());
}
