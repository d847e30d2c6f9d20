//! `kairos run`: the full pipeline — ingest (or synthesize), tag, stack,
//! fit everything, and report — under one manifest.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

use super::{community, enrich, fit_decay, fit_scaling, fit_tail, ingest, report, stack, synth, tag};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct RunArgs {
    /// Generate a synthetic dataset instead of ingesting raw inputs.
    #[arg(long)]
    pub from_synth: bool,
    #[command(flatten)]
    pub ingest: ingest::IngestArgs,
    #[command(flatten)]
    pub synth: synth::SynthArgs,
    #[command(flatten)]
    pub tag: tag::TagArgs,
    #[command(flatten)]
    pub stack: stack::StackArgs,
    #[command(flatten)]
    pub fit_decay: fit_decay::FitDecayArgs,
    #[command(flatten)]
    pub fit_tail: fit_tail::FitTailArgs,
    #[command(flatten)]
    pub fit_scaling: fit_scaling::FitScalingArgs,
    #[command(flatten)]
    pub community: community::CommunityArgs,
    #[command(flatten)]
    pub enrich: enrich::EnrichArgs,
}

pub fn run(cfg: &RunConfig, args: &RunArgs, out_dir: &Path, manifest: &mut Manifest) -> Result<()> {
    let mut tag_args = args.tag.clone();
    if args.from_synth {
        synth::run(cfg, &args.synth, out_dir, manifest).context("stage synth")?;
        // The synthetic lexicons live in the output directory; use them
        // unless the user pointed at their own.
        if tag_args.lexicons.is_none() && cfg.lexicons.is_none() {
            tag_args.lexicons = Some(out_dir.join(artifacts::SYNTH_LEXICONS));
        }
    } else {
        ingest::run(cfg, &args.ingest, out_dir, manifest).context("stage ingest")?;
    }

    tag::run(cfg, &tag_args, out_dir, manifest).context("stage tag")?;
    stack::run(cfg, &args.stack, out_dir, manifest).context("stage stack")?;
    fit_decay::run(cfg, &args.fit_decay, out_dir, manifest).context("stage fit-decay")?;
    fit_tail::run(cfg, &args.fit_tail, out_dir, manifest).context("stage fit-tail")?;
    fit_scaling::run(cfg, &args.fit_scaling, out_dir, manifest).context("stage fit-scaling")?;
    community::run(cfg, &args.community, out_dir, manifest).context("stage community")?;
    enrich::run(cfg, &args.enrich, out_dir, manifest).context("stage enrich")?;
    report::run(cfg, &report::ReportArgs::default(), out_dir, manifest).context("stage report")?;
    Ok(())
}
