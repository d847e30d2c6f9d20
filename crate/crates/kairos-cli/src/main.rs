//! `kairos`: quantify burst-driven collective-action ecosystems from
//! hackathon metadata and repository event streams.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use kairos_cli::artifacts::{self, Manifest};
use kairos_cli::commands;
use kairos_cli::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "kairos",
    version,
    about = "Burst-driven ecosystem analytics: ingest event streams, tag goals, \
             fit relaxation/tail/scaling laws, and report.",
    propagate_version = true
)]
struct Cli {
    /// TOML config file; command-line flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory all artifacts are written to (and read back from)
    /// [default: out].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Cap the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load raw tables and event streams, clean them, write the dataset.
    Ingest(commands::ingest::IngestArgs),
    /// Match goal lexicons against hackathon text and summarize coverage.
    Tag(commands::tag::TagArgs),
    /// Stack activity and repository creations around hackathon starts.
    Stack(commands::stack::StackArgs),
    /// Fit the post-peak power-law relaxation and classify the cascade.
    FitDecay(commands::fit_decay::FitDecayArgs),
    /// Fit the participation-count tail by maximum likelihood.
    FitTail(commands::fit_tail::FitTailArgs),
    /// Fit output volume against contributor count.
    FitScaling(commands::fit_scaling::FitScalingArgs),
    /// Newcomer inflow and ecosystem growth statistics.
    Community(commands::community::CommunityArgs),
    /// Goal-by-technology enrichment matrix with clustering.
    Enrich(commands::enrich::EnrichArgs),
    /// Generate a synthetic dataset with known planted parameters.
    Synth(commands::synth::SynthArgs),
    /// Summarize all existing artifacts as Markdown.
    Report(commands::report::ReportArgs),
    /// Run the full pipeline: ingest (or synth) through report.
    Run(commands::run::RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest(_) => "ingest",
            Command::Tag(_) => "tag",
            Command::Stack(_) => "stack",
            Command::FitDecay(_) => "fit-decay",
            Command::FitTail(_) => "fit-tail",
            Command::FitScaling(_) => "fit-scaling",
            Command::Community(_) => "community",
            Command::Enrich(_) => "enrich",
            Command::Synth(_) => "synth",
            Command::Report(_) => "report",
            Command::Run(_) => "run",
        }
    }

    fn flags_json(&self) -> serde_json::Value {
        let result = match self {
            Command::Ingest(a) => serde_json::to_value(a),
            Command::Tag(a) => serde_json::to_value(a),
            Command::Stack(a) => serde_json::to_value(a),
            Command::FitDecay(a) => serde_json::to_value(a),
            Command::FitTail(a) => serde_json::to_value(a),
            Command::FitScaling(a) => serde_json::to_value(a),
            Command::Community(a) => serde_json::to_value(a),
            Command::Enrich(a) => serde_json::to_value(a),
            Command::Synth(a) => serde_json::to_value(a),
            Command::Report(a) => serde_json::to_value(a),
            Command::Run(a) => serde_json::to_value(a),
        };
        result.unwrap_or(serde_json::Value::Null)
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    artifacts::ensure_out_dir(&out_dir)?;

    let threads = cli.threads.or(config.threads).filter(|&n| n > 0);
    if let Some(threads) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("setting the thread-pool size")?;
    }

    let echo = serde_json::json!({
        "config_file": cli.config.as_ref().map(|p| p.display().to_string()),
        "config": config,
        "flags": cli.command.flags_json(),
        "out_dir": out_dir.display().to_string(),
        "threads": threads,
    });
    let mut manifest = Manifest::new(cli.command.name(), echo);
    if let Some(path) = &cli.config {
        manifest.record_input(path)?;
    }

    match &cli.command {
        Command::Ingest(args) => commands::ingest::run(&config, args, &out_dir, &mut manifest),
        Command::Tag(args) => commands::tag::run(&config, args, &out_dir, &mut manifest),
        Command::Stack(args) => commands::stack::run(&config, args, &out_dir, &mut manifest),
        Command::FitDecay(args) => {
            commands::fit_decay::run(&config, args, &out_dir, &mut manifest)
        }
        Command::FitTail(args) => commands::fit_tail::run(&config, args, &out_dir, &mut manifest),
        Command::FitScaling(args) => {
            commands::fit_scaling::run(&config, args, &out_dir, &mut manifest)
        }
        Command::Community(args) => {
            commands::community::run(&config, args, &out_dir, &mut manifest)
        }
        Command::Enrich(args) => commands::enrich::run(&config, args, &out_dir, &mut manifest),
        Command::Synth(args) => commands::synth::run(&config, args, &out_dir, &mut manifest),
        Command::Report(args) => commands::report::run(&config, args, &out_dir, &mut manifest),
        Command::Run(args) => commands::run::run(&config, args, &out_dir, &mut manifest),
    }?;

    manifest.write(&out_dir)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let machine = serde_json::json!({
                "error": {
                    "command": cli.command.name(),
                    "message": format!("{err:#}"),
                }
            });
            eprintln!("{machine}");
            ExitCode::FAILURE
        }
    }
}
