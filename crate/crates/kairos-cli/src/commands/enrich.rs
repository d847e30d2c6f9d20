//! `kairos enrich`: goal-by-technology enrichment matrix and hierarchical
//! clustering of both axes.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use kairos::enrich::{build_matrix, cluster, Axis, DEFAULT_MIN_PREVALENCE};
use kairos::sdg::N_SDGS;
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct EnrichArgs {
    /// Keep technologies present in at least this fraction of hackathons.
    #[arg(long)]
    pub min_prevalence: Option<f64>,
    /// Z-score rows/columns before clustering instead of using raw cells.
    #[arg(long)]
    pub standardize: bool,
}

pub fn run(
    cfg: &RunConfig,
    args: &EnrichArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let dataset = super::load_clean_dataset(out_dir, manifest)?;
    let tags_path = artifacts::require(out_dir, artifacts::TAGS, "tag")?;
    manifest.record_input(&tags_path)?;
    let tagsets = super::read_tagsets(&tags_path)?;

    let min_prevalence = args
        .min_prevalence
        .or(cfg.min_prevalence)
        .unwrap_or(DEFAULT_MIN_PREVALENCE);
    let standardize = args.standardize || cfg.standardize.unwrap_or(false);

    let matrix = build_matrix(
        &dataset.hackathons,
        &dataset.projects,
        &tagsets,
        min_prevalence,
    )
    .context("enrich: building the matrix")?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (t, tech) in matrix.technologies.iter().enumerate() {
        for sdg in 1..=N_SDGS {
            rows.push(vec![
                tech.clone(),
                sdg.to_string(),
                artifacts::f(matrix.cells[t][sdg - 1]),
            ]);
        }
    }
    artifacts::write_csv(
        &out_dir.join(artifacts::ENRICHMENT),
        &["technology", "sdg", "percent"],
        &rows,
    )?;
    manifest.record_output(artifacts::ENRICHMENT);

    let row_tree = cluster(&matrix, Axis::Rows, standardize).context("enrich: row clustering")?;
    let col_tree = cluster(&matrix, Axis::Cols, standardize).context("enrich: column clustering")?;
    let dendro = serde_json::json!({
        "standardized": standardize,
        "rows": row_tree,
        "cols": col_tree,
    });
    artifacts::write_json(&out_dir.join(artifacts::DENDROGRAM), &dendro)?;
    manifest.record_output(artifacts::DENDROGRAM);

    let mut leaf_text = String::new();
    for label in &row_tree.leaf_order {
        leaf_text.push_str(label);
        leaf_text.push('\n');
    }
    std::fs::write(out_dir.join(artifacts::LEAF_ORDER), leaf_text)
        .context("enrich: writing leaf order")?;
    manifest.record_output(artifacts::LEAF_ORDER);

    eprintln!(
        "enrich: {} technologies x {} goals; {:.2} hackathons aligned per goal on average",
        matrix.technologies.len(),
        N_SDGS,
        matrix.sdg_hackathon_counts.iter().sum::<u64>() as f64 / N_SDGS as f64,
    );
    Ok(())
}
