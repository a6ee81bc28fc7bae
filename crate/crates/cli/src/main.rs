use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use otto_cli::{load_config, run_command, Artifacts, CliError, Command, Figure, RunConfig};

#[derive(Parser)]
#[command(name = "otto", version, about = "Limit cycles of a coupled-spin quantum Otto engine")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON run configuration (optional for `figure`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// CSV destination; overrides `output.path`. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for `sweep`.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Limit-cycle corners, cycle-map spectrum and thermodynamic ledger.
    LimitCycle,
    /// Cycle-map iterates and their distances to the limit cycle.
    Iterate,
    /// Dense samples along one cycle.
    Trajectory,
    /// Eigenvalues of the cycle map.
    Spectrum,
    /// One limit-cycle row per grid point of `run.sweep`.
    Sweep,
    /// Parameter presets of the published figures.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
    },
    /// Energy entropy of the Gibbs state against the field.
    Equilibrium,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let command = match cli.command {
        Cmd::LimitCycle => Command::LimitCycle,
        Cmd::Iterate => Command::Iterate,
        Cmd::Trajectory => Command::Trajectory,
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Sweep => Command::Sweep,
        Cmd::Equilibrium => Command::Equilibrium,
        Cmd::Figure { name } => Command::Figure(match name {
            FigureName::Fig1 => Figure::Fig1,
            FigureName::Fig2 => Figure::Fig2,
            FigureName::Fig3 => Figure::Fig3,
            FigureName::Fig5 => Figure::Fig5,
            FigureName::Fig6 => Figure::Fig6,
        }),
    };
    let cfg = match (&cli.config, command) {
        (Some(path), _) => load_config(path)?,
        (None, Command::Figure(_)) => otto_cli::parse_config("{}")?,
        (None, _) => return Err(CliError::config("--config", "required for this command")),
    };
    let art = run_command(&cfg, command, cli.threads.map(usize::from))?;
    write(&cfg, cli.out.as_deref(), &art)
}

fn write(cfg: &RunConfig, out: Option<&Path>, art: &Artifacts) -> Result<(), CliError> {
    let precision = cfg.output.precision;
    match out.or(cfg.output.path.as_deref()) {
        Some(path) => {
            std::fs::write(path, art.primary.render(precision))?;
            for (suffix, table) in &art.secondary {
                std::fs::write(companion(path, suffix), table.render(precision))?;
            }
        }
        None => print!("{}", art.primary.render(precision)),
    }
    Ok(())
}

/// `out.csv` → `out.<suffix>.csv`.
fn companion(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{suffix}.{ext}"))
}
