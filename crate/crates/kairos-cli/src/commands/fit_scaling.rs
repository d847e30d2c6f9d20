//! `kairos fit-scaling`: fit output volume against contributor count
//! across repo-time windows.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use kairos::dynamics::{
    fit_scaling_pairs, productivity_windows, DEFAULT_SCALING_WINDOW_DAYS,
};
use kairos::ingest::link_repos;
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FitScalingArgs {
    /// Pre-aggregated pairs CSV (columns: contributors, output). When
    /// absent, scaling_pairs.csv in the output directory is used if
    /// present; otherwise pairs come from the cleaned event streams.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Repo-time window length in days for event aggregation.
    #[arg(long)]
    pub scaling_window_days: Option<i64>,
}

pub fn run(
    cfg: &RunConfig,
    args: &FitScalingArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let window_days = args
        .scaling_window_days
        .or(cfg.scaling_window_days)
        .unwrap_or(DEFAULT_SCALING_WINDOW_DAYS);

    // Source priority: explicit --pairs, then a pairs artifact in the
    // output directory (the synthetic generator plants one), then windowed
    // aggregation of the cleaned event streams.
    let planted = out_dir.join(artifacts::SCALING_PAIRS);
    let pairs = if let Some(path) = &args.pairs {
        manifest.record_input(path)?;
        super::read_pairs(path)?
    } else if planted.is_file() {
        manifest.record_input(&planted)?;
        super::read_pairs(&planted)?
    } else {
        let dataset = super::load_clean_dataset(out_dir, manifest)?;
        let (linked, _) = link_repos(&dataset.projects, &dataset.events);
        productivity_windows(&linked, window_days).context("fit-scaling")?
    };

    let fit = fit_scaling_pairs(&pairs, window_days).context("fit-scaling")?;
    artifacts::write_json(&out_dir.join(artifacts::SCALING_FIT), &fit)?;
    manifest.record_output(artifacts::SCALING_FIT);

    let mut sorted = pairs;
    sorted.sort_unstable();
    let rows: Vec<Vec<String>> = sorted
        .iter()
        .map(|&(c, r)| vec![c.to_string(), r.to_string()])
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::SCALING_WINDOWS),
        &["contributors", "output"],
        &rows,
    )?;
    manifest.record_output(artifacts::SCALING_WINDOWS);

    eprintln!(
        "fit-scaling: beta = {:.4} ± {:.4} over {} windows",
        fit.beta, fit.beta_stderr, fit.n_windows
    );
    Ok(())
}
