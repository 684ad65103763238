mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use acasimir::exec;
use clap::{Parser, ValueEnum};

use commands::{Context, Run};
use config::{ConfigError, RawConfig, RunConfig, Units};
use output::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    PressureSweep,
    CompareElectrostatic,
    Bifurcation,
    PullIn,
    DesignBandwidth,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::PressureSweep => "pressure-sweep",
            Command::CompareElectrostatic => "compare-electrostatic",
            Command::Bifurcation => "bifurcation",
            Command::PullIn => "pull-in",
            Command::DesignBandwidth => "design-bandwidth",
        }
    }
}

/// Acoustic Casimir pressure sweeps and micro-switch pull-in analysis.
///
/// Writes `<out>/sweep.csv` and `<out>/manifest.json`. Exit codes: 0 ok,
/// 2 config error, 3 numerical failure, 4 I/O error. ACASIMIR_THREADS caps
/// the worker threads.
#[derive(Debug, Parser)]
#[command(name = "acasimir", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config entry, e.g. `--set L_max=8e-5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Lengths (D, L_min, L_max, L_target) are given in micrometers.
    #[arg(long, conflicts_with = "nm")]
    um: bool,
    /// Lengths are given in nanometers.
    #[arg(long)]
    nm: bool,
    /// Angular frequencies (omega1, omega2) are given in units of 1e6 rad/s.
    #[arg(long, conflicts_with = "giga")]
    mega: bool,
    /// Angular frequencies are given in units of 1e9 rad/s.
    #[arg(long)]
    giga: bool,
    /// Output directory (falls back to `out_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Config(ConfigError),
    Numerical(acasimir::Error),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Numerical(e) => write!(f, "numerical failure: {e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<acasimir::Error> for Failure {
    fn from(e: acasimir::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e)
        } else {
            Failure::Config(ConfigError::general(e.to_string()))
        }
    }
}

fn thread_cap() -> Result<usize, ConfigError> {
    match std::env::var("ACASIMIR_THREADS") {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            ConfigError::general(format!(
                "ACASIMIR_THREADS: `{v}` is not a non-negative integer"
            ))
        }),
    }
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf), Failure> {
    let mut raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
            RawConfig::parse(&text, &path.display().to_string())?
        }
        None => RawConfig::default(),
    };
    for item in &cli.overrides {
        raw.apply_override(item)?;
    }
    let units = Units {
        length_divisor: if cli.um {
            1e6
        } else if cli.nm {
            1e9
        } else {
            1.0
        },
        frequency_factor: if cli.mega {
            1e6
        } else if cli.giga {
            1e9
        } else {
            1.0
        },
    };
    let cfg = RunConfig::resolve(&raw, units)?;
    let out = cli
        .out
        .clone()
        .or_else(|| raw.get("out_dir").map(PathBuf::from))
        .ok_or_else(|| ConfigError::general("no output directory: pass --out or set out_dir"))?;
    if cli.command == Command::DesignBandwidth && cfg.band.design.is_none() {
        return Err(ConfigError::general(
            "design-bandwidth needs L_target (and optionally n, rel_width)",
        )
        .into());
    }
    Ok((cfg, out))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    exec::init_threads(thread_cap()?);
    let (cfg, out) = load(cli)?;
    let mut ctx = Context::new(&cfg);

    let Run {
        table,
        results,
        report,
        mut warnings,
    } = match cli.command {
        Command::PressureSweep => commands::pressure_sweep(&mut ctx)?,
        Command::CompareElectrostatic => commands::compare_electrostatic(&mut ctx)?,
        Command::Bifurcation => commands::bifurcation(&mut ctx)?,
        Command::PullIn => commands::pull_in(&mut ctx)?,
        Command::DesignBandwidth => commands::design_bandwidth(&mut ctx)?,
    };

    let (lo, hi) = match cli.command {
        Command::Bifurcation | Command::PullIn => (
            cfg.sweep.l_tilde_min * cfg.device.rest_gap,
            cfg.sweep.l_tilde_max * cfg.device.rest_gap,
        ),
        _ => (cfg.sweep.gap_min, cfg.sweep.gap_max),
    };
    let signs = ctx.sign_report(lo, hi)?;
    if signs.mismatches > 0 {
        for p in signs.peaks.iter().filter(|p| !p.repulsive) {
            warnings.push(format!(
                "sign mismatch: P = {:+.6e} Pa at predicted repulsive gap n = {} (L = {:.6e} m)",
                p.pressure_pa, p.n, p.gap_m
            ));
        }
    }

    let Context { stats, stages, .. } = ctx;
    let manifest = Manifest {
        tool: "acasimir",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config: &cfg,
        threads: exec::current_threads(),
        stages: stages.into_vec(),
        quadrature: stats.summary(),
        sign_report: signs,
        results,
        warnings,
    };
    output::write_outputs(&out, &table, &manifest)
        .map_err(|e| Failure::Io(format!("{}: {e}", out.display())))?;

    for line in &report {
        println!("{line}");
    }
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "wrote {} ({} rows) and manifest.json",
        out.join("sweep.csv").display(),
        table.rows()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("acasimir: {e}");
            ExitCode::from(e.code())
        }
    }
}
