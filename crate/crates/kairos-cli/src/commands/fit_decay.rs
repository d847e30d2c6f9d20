//! `kairos fit-decay`: fit the post-peak power-law relaxation of a stacked
//! series and classify the cascade regime.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use kairos::dynamics::{
    classify_cascade, fit_relaxation, DEFAULT_BINS_PER_DECADE,
};
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

/// Reference offset for the mixing note; the regime boundary sits at
/// exponent 1, and theta spans the band around it worth flagging.
pub const DEFAULT_THETA: f64 = 0.40;
/// How many standard errors away from 1 the exponent must sit before the
/// regime call leaves "indeterminate".
pub const DEFAULT_MARGIN_SIGMAS: f64 = 2.0;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct FitDecayArgs {
    /// Which stacked series to fit: "activity" or "repo-creations".
    #[arg(long)]
    pub series: Option<String>,
    /// Fit window as day offsets after the peak, e.g. --fit-window=1,500.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub fit_window: Option<Vec<i64>>,
    /// Logarithmic bins per decade of days-since-peak.
    #[arg(long)]
    pub bins_per_decade: Option<u32>,
    /// Half-width of the near-boundary band flagged in the regime note.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Standard-error multiple required to call a regime.
    #[arg(long)]
    pub margin_sigmas: Option<f64>,
}

pub fn run(
    cfg: &RunConfig,
    args: &FitDecayArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let series_kind = args
        .series
        .clone()
        .or_else(|| cfg.series.clone())
        .unwrap_or_else(|| "activity".to_string());
    let (file, producer) = match series_kind.as_str() {
        "activity" => (artifacts::STACK_ACTIVITY, "stack"),
        "repo-creations" => (artifacts::STACK_CREATIONS_SUM, "stack"),
        other => bail!("fit-decay: unknown series {other:?} (use activity or repo-creations)"),
    };
    let path = artifacts::require(out_dir, file, producer)?;
    manifest.record_input(&path)?;
    let series = super::read_series(&path)?;

    let window = super::stack::window_from(args.fit_window.as_deref())
        .or_else(|| cfg.fit_window.map(|[lo, hi]| (lo, hi)));
    let bins = args
        .bins_per_decade
        .or(cfg.bins_per_decade)
        .unwrap_or(DEFAULT_BINS_PER_DECADE);
    let theta = args.theta.or(cfg.theta).unwrap_or(DEFAULT_THETA);
    let margin = args
        .margin_sigmas
        .or(cfg.margin_sigmas)
        .unwrap_or(DEFAULT_MARGIN_SIGMAS);

    let fit = fit_relaxation(&series, window, bins).context("fit-decay")?;
    artifacts::write_json(&out_dir.join(artifacts::RELAXATION_FIT), &fit)?;
    manifest.record_output(artifacts::RELAXATION_FIT);

    let rows: Vec<Vec<String>> = fit
        .binned
        .iter()
        .map(|b| vec![artifacts::f(b.t_minus_tc), artifacts::f(b.value)])
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::RELAXATION_BINNED),
        &["t_minus_tc", "value"],
        &rows,
    )?;
    manifest.record_output(artifacts::RELAXATION_BINNED);

    let class = classify_cascade(&fit, theta, margin);
    artifacts::write_json(&out_dir.join(artifacts::CASCADE), &class)?;
    manifest.record_output(artifacts::CASCADE);

    eprintln!(
        "fit-decay: alpha = {:.4} ± {:.4} over {} bins; regime: {:?}",
        fit.alpha, fit.alpha_stderr, fit.n_bins, class.label
    );
    Ok(())
}
