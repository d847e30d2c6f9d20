//! `kairos stack`: align event activity and repository creations to each
//! hackathon's start day and stack them across hackathons.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use kairos::dynamics::{
    stack_event_activity, stack_repo_creations, DEFAULT_PEAK_WINDOW_DAYS, DEFAULT_STACK_WINDOW,
};
use kairos::ingest::link_repos;
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct StackArgs {
    /// Peak must fall within this many days of the start date (and only
    /// repositories created by then contribute).
    #[arg(long)]
    pub peak_window_days: Option<i64>,
    /// Stack window as day offsets, e.g. --stack-window=-100,700.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub stack_window: Option<Vec<i64>>,
}

pub(crate) fn window_from(pair: Option<&[i64]>) -> Option<(i64, i64)> {
    pair.map(|w| (w[0], w[1]))
}

pub fn run(
    cfg: &RunConfig,
    args: &StackArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let dataset = super::load_clean_dataset(out_dir, manifest)?;
    let (linked, _) = link_repos(&dataset.projects, &dataset.events);

    let window = window_from(args.stack_window.as_deref())
        .or_else(|| cfg.stack_window.map(|[lo, hi]| (lo, hi)))
        .unwrap_or(DEFAULT_STACK_WINDOW);
    let peak_window = args
        .peak_window_days
        .or(cfg.peak_window_days)
        .unwrap_or(DEFAULT_PEAK_WINDOW_DAYS);

    let creations = stack_repo_creations(
        &dataset.hackathons,
        &dataset.projects,
        &linked,
        Some(window),
    )
    .context("stack: repository creations")?;
    super::write_series(&out_dir.join(artifacts::STACK_CREATIONS_SUM), &creations.sum)?;
    manifest.record_output(artifacts::STACK_CREATIONS_SUM);
    super::write_series(&out_dir.join(artifacts::STACK_CREATIONS_MEAN), &creations.mean)?;
    manifest.record_output(artifacts::STACK_CREATIONS_MEAN);

    let activity = stack_event_activity(
        &dataset.hackathons,
        &dataset.projects,
        &linked,
        peak_window,
        Some(window),
    )
    .context("stack: event activity")?;
    super::write_series(&out_dir.join(artifacts::STACK_ACTIVITY), &activity)?;
    manifest.record_output(artifacts::STACK_ACTIVITY);

    eprintln!(
        "stack: {} hackathons in the activity stack, {} in the creation stack",
        activity.n_stacked, creations.sum.n_stacked
    );
    Ok(())
}
