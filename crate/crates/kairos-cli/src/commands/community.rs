//! `kairos community`: newcomer inflow per hackathon and ecosystem growth.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use kairos::community::{
    growth_rate, newcomer_ratios, ratio_vs_size, DEFAULT_SIZE_BINS_PER_DECADE,
};
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct CommunityArgs {
    /// Logarithmic bins per decade of hackathon size for the ratio curve.
    #[arg(long)]
    pub size_bins_per_decade: Option<u32>,
}

pub fn run(
    cfg: &RunConfig,
    args: &CommunityArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let dataset = super::load_clean_dataset(out_dir, manifest)?;

    let stats = newcomer_ratios(&dataset.hackathons).context("community: newcomer ratios")?;
    let rows: Vec<Vec<String>> = stats
        .ratios
        .iter()
        .map(|r| {
            vec![
                r.hackathon_id.clone(),
                r.start_date.format("%Y-%m-%d").to_string(),
                r.participants.to_string(),
                r.newcomers.to_string(),
                artifacts::f(r.ratio),
            ]
        })
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::NEWCOMER_RATIOS),
        &["hackathon_id", "start_date", "participants", "newcomers", "ratio"],
        &rows,
    )?;
    manifest.record_output(artifacts::NEWCOMER_RATIOS);

    let summary = serde_json::json!({
        "hackathons": stats.ratios.len(),
        "median_ratio": stats.median_ratio,
        "histogram": stats.histogram,
        "skipped_without_participants": stats.skipped_without_participants,
    });
    artifacts::write_json(&out_dir.join(artifacts::NEWCOMER_SUMMARY), &summary)?;
    manifest.record_output(artifacts::NEWCOMER_SUMMARY);

    let bins = args
        .size_bins_per_decade
        .or(cfg.size_bins_per_decade)
        .unwrap_or(DEFAULT_SIZE_BINS_PER_DECADE);
    let curve = ratio_vs_size(&stats, bins);
    let curve_rows: Vec<Vec<String>> = curve
        .iter()
        .map(|b| {
            vec![
                artifacts::f(b.size),
                b.n_hackathons.to_string(),
                artifacts::f(b.mean_ratio),
                artifacts::f(b.stderr),
            ]
        })
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::RATIO_VS_SIZE),
        &["size", "n_hackathons", "mean_ratio", "stderr"],
        &curve_rows,
    )?;
    manifest.record_output(artifacts::RATIO_VS_SIZE);

    let growth = growth_rate(&dataset.hackathons).context("community: growth rate")?;
    artifacts::write_json(&out_dir.join(artifacts::GROWTH), &growth)?;
    manifest.record_output(artifacts::GROWTH);

    eprintln!(
        "community: median newcomer ratio {:.3} over {} hackathons; weekly growth slope {:.4}",
        stats.median_ratio,
        stats.ratios.len(),
        growth.slope
    );
    Ok(())
}
