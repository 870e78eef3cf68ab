use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use leo_secrecy_cli::config::Config;
use leo_secrecy_cli::output::{self, Format};
use leo_secrecy_cli::sweep::{run_point, run_sweep, validation_records, SweepOutput};
use leo_secrecy_cli::{parse_workers, Mode, Preset};

/// Ergodic secrecy rate of downlink LEO satellite networks, analytically and
/// by Monte Carlo.
#[derive(Debug, Parser)]
#[command(name = "leosec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration; omitted sections take the reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Add per-point wall time (makes the output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the configured point analytically.
    Analyze,
    /// Estimate the configured point by Monte Carlo.
    Simulate,
    /// Run the configured sweep, or a built-in one.
    Sweep {
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
    /// Check analytical against Monte Carlo at λ_e|A_e| ∈ {0.5, 1, 2}, both alignments.
    Validate,
}

fn emit(cli: &Cli, result: SweepOutput) -> anyhow::Result<()> {
    let result = if cli.timing {
        result
    } else {
        result.without_timing()
    };
    match &cli.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            output::write(&mut w, &result, cli.format)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            output::write(&mut w, &result, cli.format)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Ok(raw) = std::env::var("WORKERS") {
        let n = parse_workers(&raw)?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let mut cfg = match &cli.config {
        Some(path) => Config::from_path(path)?,
        None => Config::default(),
    };
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let point_mode = |default: Mode| cli.mode.unwrap_or(default);

    let (result, strict) = match &cli.command {
        Command::Analyze | Command::Simulate => {
            cfg.mode = point_mode(match cli.command {
                Command::Analyze => Mode::Analytical,
                _ => Mode::Mc,
            });
            cfg.sweep = None;
            let rec = run_point(&cfg, 0, &cfg.base_point(), None, cfg.mode);
            let out = SweepOutput {
                config_sha256: cfg.digest(),
                config: cfg,
                records: vec![rec],
                summary: Vec::new(),
            };
            (out, false)
        }
        Command::Sweep { preset } => {
            if let Some(p) = preset {
                cfg = p.apply(cfg);
            }
            if let Some(m) = cli.mode {
                cfg.mode = m;
            }
            (run_sweep(&cfg)?, false)
        }
        Command::Validate => {
            cfg.mode = Mode::Both;
            cfg.sweep = None;
            let records = validation_records(&cfg);
            let out = SweepOutput {
                config_sha256: cfg.digest(),
                config: cfg,
                records,
                summary: Vec::new(),
            };
            (out, true)
        }
    };
    let failed = result.failed();
    let disagreements = if strict { result.disagreements() } else { 0 };
    for r in result.records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "point {}: {}",
            r.index,
            r.error.as_deref().unwrap_or_default()
        );
    }
    if strict {
        eprintln!(
            "{} of {} points within 3 standard errors",
            result.records.len() - disagreements - failed,
            result.records.len()
        );
    }
    emit(cli, result)?;
    Ok(failed == 0 && disagreements == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
