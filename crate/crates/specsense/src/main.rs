use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use specsense::config::{load_config, parse_config, CommandConfig, CommandKind};
use specsense::presets::preset;
use specsense::{commands, CliError};

/// Reproducible spectrum-sensing experiments: dataset generation, detector
/// evaluation, CNN training, Q-learning architecture search, and
/// sensing-time bandit simulation.
#[derive(Parser)]
#[command(name = "specsense", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration file for this command.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset configuration (see the README for the list).
    #[arg(long)]
    preset: Option<String>,
    /// Master seed; overrides the config value.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to out/<command>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled dataset container.
    GenData(CommonArgs),
    /// Train one detector network on a dataset.
    Train(CommonArgs),
    /// Q-learning architecture search.
    NasSearch(CommonArgs),
    /// Sensing-time bandit simulation over a section plan.
    BanditSim(CommonArgs),
    /// ROC sweep of a model-based detector over a dataset.
    Roc(CommonArgs),
    /// Detection probability versus SNR/GSNR at a calibrated threshold.
    PdCurve(CommonArgs),
    /// Architecture cost report (real multiplications and weights).
    Cost(CommonArgs),
    /// Fast cross-module sanity checks.
    Selfcheck(CommonArgs),
}

impl Command {
    fn split(self) -> (CommandKind, CommonArgs) {
        match self {
            Command::GenData(a) => (CommandKind::GenData, a),
            Command::Train(a) => (CommandKind::Train, a),
            Command::NasSearch(a) => (CommandKind::NasSearch, a),
            Command::BanditSim(a) => (CommandKind::BanditSim, a),
            Command::Roc(a) => (CommandKind::Roc, a),
            Command::PdCurve(a) => (CommandKind::PdCurve, a),
            Command::Cost(a) => (CommandKind::Cost, a),
            Command::Selfcheck(a) => (CommandKind::Selfcheck, a),
        }
    }
}

fn resolve_config(kind: CommandKind, args: &CommonArgs) -> Result<CommandConfig, CliError> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => load_config(kind, path)?,
        (None, Some(name)) => preset(kind, name)?,
        (None, None) => match kind {
            // Selfcheck and cost-style commands have sensible defaults.
            CommandKind::Selfcheck => parse_config(kind, "")?,
            _ => {
                return Err(CliError::Config(format!(
                    "{} needs --config or --preset",
                    kind.name()
                )))
            }
        },
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    if let Some(seed) = args.seed {
        config.set_seed(seed);
    }
    Ok(config)
}

fn run(kind: CommandKind, args: CommonArgs) -> Result<(), CliError> {
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))?;
    }
    let config = resolve_config(kind, &args)?;
    let out_dir = args
        .out
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let manifest = commands::run(&config, &out_dir)?;
    eprintln!(
        "{}: wrote {} outputs to {} ({:.2}s)",
        kind.name(),
        manifest.outputs.len(),
        out_dir.display(),
        manifest.duration_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match run(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
