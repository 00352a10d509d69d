use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use grover_noise::NoiseConvention;
use grover_noise_cli::commands::{self, FitModel, FitRequest};
use grover_noise_cli::config::{ExperimentConfig, Preset, Threads};
use grover_noise_cli::{exit_code, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "grover-noise", version, about = "Noisy Grover search simulator")]
struct Cli {
    /// Flat `key = value` config file, applied after the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads: a positive integer or `auto`.
    #[arg(long, global = true)]
    threads: Option<Threads>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "paper")]
    preset: Preset,
    /// `stddev` (default) or `paper`.
    #[arg(long, global = true)]
    noise_convention: Option<NoiseConvention>,
    /// Suppress per-cell progress on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noiseless closed-form amplitudes.
    Exact {
        #[arg(long)]
        n: u32,
        /// Last step (default m_max).
        #[arg(long)]
        steps: Option<u64>,
    },
    /// One seeded noisy trajectory.
    Trajectory {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        sigma: f64,
        /// Last step (default 2·m_max).
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Averaged ladder search for one cell.
    SigmaMax {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p_cut: f64,
        #[arg(long)]
        d_sigma: f64,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Full grid with extrapolation and fits.
    Sweep,
    /// Break-even table for iterated search.
    Table1,
    /// Fit a model to a CSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// power | linear | shifted-power
        #[arg(long)]
        model: FitModel,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        p_cut: Option<f64>,
        #[arg(long)]
        x_col: Option<String>,
        #[arg(long)]
        y_col: Option<String>,
        #[arg(long)]
        err_col: Option<String>,
    },
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::preset(cli.preset);
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(c) = cli.noise_convention {
        cfg.convention = c;
    }
    cfg.progress = !cli.quiet;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = resolve(&cli)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let out_dir = cli.out.as_deref();
    let threads = cfg.threads;
    match cli.command {
        Command::Exact { n, steps } => commands::cmd_exact(n, steps, out_dir, &mut out),
        Command::Trajectory { n, sigma, steps } => {
            commands::cmd_trajectory(n, sigma, steps, &cfg, out_dir, &mut out)
        }
        Command::SigmaMax { n, p_cut, d_sigma, runs } => {
            if let Some(r) = runs {
                cfg.runs = r;
            }
            commands::with_pool(threads, || {
                let mut buf = Vec::new();
                commands::cmd_sigma_max(&cfg, n, p_cut, d_sigma, &mut buf).map(|_| buf)
            })?
            .and_then(|buf| Ok(out.write_all(&buf)?))
        }
        Command::Sweep => commands::with_pool(threads, || {
            let mut buf = Vec::new();
            commands::cmd_sweep(&cfg, &mut buf).map(|_| buf)
        })?
        .and_then(|buf| Ok(out.write_all(&buf)?)),
        Command::Table1 => commands::with_pool(threads, || {
            let mut buf = Vec::new();
            commands::cmd_table1(&cfg, &mut buf).map(|_| buf)
        })?
        .and_then(|buf| Ok(out.write_all(&buf)?)),
        Command::Fit { input, model, n, p_cut, x_col, y_col, err_col } => {
            let req = FitRequest { input, n, p_cut, x_col, y_col, err_col };
            commands::cmd_fit(&req, model, &mut out).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
