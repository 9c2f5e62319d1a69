use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ksns_cli::calibrate::{critical_g, critical_mass};
use ksns_cli::config::{RunConfig, SweepConfig};
use ksns_cli::error::{CliError, Result};
use ksns_cli::plots::emit_plots;
use ksns_cli::run::{out_dir, run_comparison, run_single, run_sweep};
use ksns_cli::verify::verify_all;

#[derive(Parser)]
#[command(name = "ksns", version, about = "Keller-Segel with buoyancy-driven flow: batch experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// INI configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `[run] out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (overrides `[sweep] workers`).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for random data (overrides `[run] seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration.
    Run,
    /// Co-evolve Navier-Stokes and static-Stokes runs for each `compare_B`.
    Compare,
    /// Run the (g, B) grid of the `[sweep]` section.
    Sweep,
    /// Write SVG plots for diagnostics, comparison or regime-map CSVs.
    Plot {
        csv: Vec<PathBuf>,
    },
    /// Run the built-in identity and oracle checks.
    Verify,
    /// Bisect for a critical mass (no flow) or a critical g (static Stokes).
    Calibrate {
        what: Target,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Mass,
    G,
}

fn read_config(cli: &Cli) -> Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn run_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::parse(&read_config(cli)?)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run => {
            let cfg = run_config(cli)?;
            let out = run_single(&cfg, &out_dir(&cfg, cli.out.as_ref()))?;
            println!("{} at t = {}: {}", out.kind, out.t_final, out.reason);
        }
        Command::Compare => {
            let cfg = run_config(cli)?;
            for s in run_comparison(&cfg, &cfg.compare_b, &out_dir(&cfg, cli.out.as_ref()))? {
                println!("B = {}: sup ||r||^2 = {:.6e}, sup ||v||^2 = {:.6e}, {}", s.b, s.sup_r_sq, s.sup_v_sq, s.outcome.kind);
            }
        }
        Command::Sweep => {
            let mut sweep = SweepConfig::parse(&read_config(cli)?)?;
            if let Some(s) = cli.seed {
                sweep.template.seed = s;
            }
            if let Some(w) = cli.workers {
                sweep.workers = w.max(1);
            }
            let out = out_dir(&sweep.template, cli.out.as_ref());
            let rows = run_sweep(&sweep, &out)?;
            println!("{} cells written to {}", rows.len(), out.join("regime_map.csv").display());
        }
        Command::Plot { csv } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("plots"));
            let report = emit_plots(csv, &out)?;
            for f in &report.files {
                println!("{}", f.display());
            }
        }
        Command::Verify => {
            let checks = verify_all()?;
            for c in &checks {
                println!("{c}");
            }
            if checks.iter().any(|c| !c.pass) {
                return Err(CliError::Other("verification failed".into()));
            }
        }
        Command::Calibrate { what, lo, hi, tol } => {
            let cfg = run_config(cli)?;
            let b = match what {
                Target::Mass => critical_mass(&cfg, *lo, *hi, *tol)?,
                Target::G => critical_g(&cfg, *lo, *hi, *tol)?,
            };
            for (x, v) in &b.evals {
                println!("{x:.6e} {v}");
            }
            println!("critical value in [{:.6e}, {:.6e}]", b.lo, b.hi);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("KSNS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // ignore failure: the pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ksns: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
