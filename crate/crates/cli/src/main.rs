use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paintmood_cli::config::BackendChoice;
use paintmood_cli::{
    cmd_analyze, cmd_annotate, cmd_colors, cmd_ingest, cmd_plot, Analysis, CliError,
    PipelineConfig, PlotKind,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "paintmood",
    version,
    about = "Emotion and color analysis of figure paintings"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML or JSON pipeline config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and charts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendChoice>,
    /// Seed for the stub backend.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dilation iterations for color profiles.
    #[arg(long, global = true)]
    dilation: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Add metadata files (CSV or NDJSON) to the corpus store.
    Ingest { inputs: Vec<PathBuf> },
    /// Annotate faces and emotions.
    Annotate {
        /// Re-annotate paintings that already have annotations.
        #[arg(long)]
        force: bool,
    },
    /// Compute color profiles from painting images.
    Colors {
        #[arg(long)]
        force: bool,
        /// Write each classified color mask as a PNG into this directory.
        #[arg(long)]
        dump_masks: Option<PathBuf>,
    },
    /// Run analyses and write report tables.
    Analyze {
        #[arg(value_enum, default_value = "all")]
        which: Analysis,
    },
    /// Draw SVG charts from the reports.
    Plot {
        #[arg(value_enum, default_value = "all")]
        which: PlotKind,
    },
}

fn load_config(common: &Common) -> Result<PipelineConfig, CliError> {
    let mut config = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if let Some(kind) = common.backend {
        config.backend.kind = kind;
    }
    if let Some(seed) = common.seed {
        config.backend.seed = seed;
    }
    if let Some(d) = common.dilation {
        config.dilation_iterations = d;
    }
    Ok(config)
}

fn print<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = load_config(&cli.common)?;
    match cli.command {
        Command::Ingest { inputs } => print(&cmd_ingest(&config, &inputs)?),
        Command::Annotate { force } => print(&cmd_annotate(&config, force)?),
        Command::Colors { force, dump_masks } => {
            print(&cmd_colors(&config, force, dump_masks.as_deref())?)
        }
        Command::Analyze { which } => print(&cmd_analyze(&config, which)?),
        Command::Plot { which } => {
            let written: Vec<String> = cmd_plot(&config, which)?
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            print(&written)
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
