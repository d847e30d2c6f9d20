//! `kairos tag`: match goal lexicons against hackathon text, apply the
//! correction vector, and summarize yearly coverage.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use kairos::sdg::{
    coverage_by_year, fit_trend, load_lexicons, tag_all, CorrectionVector, N_SDGS,
};
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct TagArgs {
    /// Lexicon CSV (columns: dictionary, sdg, pattern).
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    /// Correction-weight CSV (columns: sdg, weight); uniform 1.0 if absent.
    #[arg(long)]
    pub correction: Option<PathBuf>,
    /// A goal counts as aligned when its corrected score exceeds this.
    #[arg(long)]
    pub alignment_threshold: Option<f64>,
}

pub fn run(cfg: &RunConfig, args: &TagArgs, out_dir: &Path, manifest: &mut Manifest) -> Result<()> {
    let dataset = super::load_clean_dataset(out_dir, manifest)?;

    let lexicons_path = args
        .lexicons
        .clone()
        .or_else(|| cfg.lexicons.clone())
        .ok_or_else(|| {
            anyhow::anyhow!("tag: no lexicon file (pass --lexicons or set lexicons)")
        })?;
    manifest.record_input(&lexicons_path)?;
    let lexicons = load_lexicons(&lexicons_path).context("tag: loading lexicons")?;

    let correction = match args.correction.clone().or_else(|| cfg.correction.clone()) {
        Some(path) => {
            manifest.record_input(&path)?;
            CorrectionVector::load(&path).context("tag: loading correction weights")?
        }
        None => CorrectionVector::default(),
    };
    let threshold = args
        .alignment_threshold
        .or(cfg.alignment_threshold)
        .unwrap_or(0.0);

    let tagsets =
        tag_all(&dataset.hackathons, &lexicons, &correction, threshold).context("tag")?;

    // tags.csv: only goals with raw hits produce rows; hackathons with no
    // hits at all are absent (downstream readers treat absence as zero).
    let mut rows: Vec<Vec<String>> = Vec::new();
    for set in &tagsets {
        for sdg in 1..=N_SDGS {
            if set.raw[sdg - 1] > 0 {
                rows.push(vec![
                    set.hackathon_id.clone(),
                    sdg.to_string(),
                    set.raw[sdg - 1].to_string(),
                    artifacts::f(set.corrected[sdg - 1]),
                    set.aligned[sdg - 1].to_string(),
                ]);
            }
        }
    }
    artifacts::write_csv(
        &out_dir.join(artifacts::TAGS),
        &["hackathon_id", "sdg", "raw", "corrected", "aligned"],
        &rows,
    )?;
    manifest.record_output(artifacts::TAGS);

    let coverage = coverage_by_year(&dataset.hackathons, &tagsets);
    let mut header: Vec<String> = ["year", "hackathons", "sdg_related", "percentage"]
        .map(String::from)
        .to_vec();
    header.extend((1..=N_SDGS).map(|s| format!("share_sdg{s}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let coverage_rows: Vec<Vec<String>> = coverage
        .iter()
        .map(|y| {
            let mut row = vec![
                y.year.to_string(),
                y.hackathons.to_string(),
                y.sdg_related.to_string(),
                artifacts::f(y.percentage),
            ];
            row.extend(y.shares.iter().map(|&s| artifacts::f(s)));
            row
        })
        .collect();
    artifacts::write_csv(&out_dir.join(artifacts::COVERAGE), &header_refs, &coverage_rows)?;
    manifest.record_output(artifacts::COVERAGE);

    // Trend over yearly percentages; corpora spanning under 3 years simply
    // report that the trend is unavailable rather than failing the stage.
    let points: Vec<(i32, f64)> = coverage.iter().map(|y| (y.year, y.percentage)).collect();
    let trend_json = match fit_trend(&points) {
        Ok(fit) => serde_json::json!({ "available": true, "fit": fit }),
        Err(err) => serde_json::json!({ "available": false, "reason": err.to_string() }),
    };
    artifacts::write_json(&out_dir.join(artifacts::TREND), &trend_json)?;
    manifest.record_output(artifacts::TREND);

    let related = tagsets.iter().filter(|t| t.is_sdg_related()).count();
    eprintln!(
        "tag: {related} of {} hackathons aligned with at least one goal",
        dataset.hackathons.len()
    );
    Ok(())
}
