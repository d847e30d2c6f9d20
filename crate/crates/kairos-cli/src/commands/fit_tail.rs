//! `kairos fit-tail`: maximum-likelihood power-law fit of the
//! participation-count distribution, with survival curves and moment
//! finiteness verdicts.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use kairos::tails::{empirical_ccdf, fit_tail, moment_stability, ZetaSampler};
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FitTailArgs {
    /// Counts file (last comma-separated field per line, header allowed).
    /// Defaults to participation_counts.csv in the output directory.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Fix the lower cutoff instead of selecting it by KS distance.
    #[arg(long)]
    pub tail_x_min: Option<u64>,
}

pub fn run(
    cfg: &RunConfig,
    args: &FitTailArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let path = match &args.counts {
        Some(path) => path.clone(),
        None => artifacts::require(out_dir, artifacts::PARTICIPATION, "ingest")?,
    };
    manifest.record_input(&path)?;
    let counts = super::read_counts(&path)?;

    let x_min = args.tail_x_min.or(cfg.tail_x_min);
    let fit = fit_tail(&counts, x_min).context("fit-tail")?;
    artifacts::write_json(&out_dir.join(artifacts::TAIL_FIT), &fit)?;
    manifest.record_output(artifacts::TAIL_FIT);

    let moments = moment_stability(&fit);
    artifacts::write_json(&out_dir.join(artifacts::MOMENTS), &moments)?;
    manifest.record_output(artifacts::MOMENTS);

    // Survival curves: empirical at every distinct observed value, the
    // fitted model alongside wherever the fit covers (x >= x_min).
    let sampler = ZetaSampler::new(fit.mu, fit.x_min).context("fit-tail: model curve")?;
    let empirical = empirical_ccdf(&counts).context("fit-tail: empirical curve")?;
    let rows: Vec<Vec<String>> = empirical
        .iter()
        .map(|&(x, p)| {
            let model = if x >= fit.x_min {
                artifacts::f(sampler.ccdf(x))
            } else {
                String::new()
            };
            vec![x.to_string(), artifacts::f(p), model]
        })
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::CCDF),
        &["x", "empirical", "model"],
        &rows,
    )?;
    manifest.record_output(artifacts::CCDF);

    eprintln!(
        "fit-tail: mu = {:.4} ± {:.4}, x_min = {}, n_tail = {}",
        fit.mu, fit.mu_stderr, fit.x_min, fit.n_tail
    );
    Ok(())
}
