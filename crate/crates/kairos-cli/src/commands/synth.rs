//! `kairos synth`: generate a synthetic ecosystem with known planted
//! parameters, written in the exact layout the analysis stages consume.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use kairos::synth::{gen_dataset, gen_participation_counts, gen_scaling_pairs, synth_lexicons};
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::{RunConfig, SynthConfig};

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_hackathons: Option<usize>,
    /// Planted relaxation exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Mean daily event count one day after the peak.
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub decay_days: Option<i64>,
    /// Planted tail exponent (survival convention).
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub x_min: Option<u64>,
    #[arg(long)]
    pub n_participation: Option<usize>,
    /// Planted productivity exponent.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub scaling_c_max: Option<u64>,
    #[arg(long)]
    pub scaling_reps: Option<usize>,
    /// "poisson" or "noiseless".
    #[arg(long)]
    pub noise: Option<String>,
}

impl SynthArgs {
    /// View the flags as a config fragment so the same merge logic applies.
    pub fn as_config(&self) -> SynthConfig {
        SynthConfig {
            seed: self.seed,
            n_hackathons: self.n_hackathons,
            alpha: self.alpha,
            amplitude: self.amplitude,
            decay_days: self.decay_days,
            mu: self.mu,
            x_min: self.x_min,
            n_participation: self.n_participation,
            beta: self.beta,
            scaling_c_max: self.scaling_c_max,
            scaling_reps: self.scaling_reps,
            noise: self.noise.clone(),
            cohorts: None,
        }
    }
}

pub fn run(
    cfg: &RunConfig,
    args: &SynthArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let spec = cfg.synth_spec(&args.as_config())?;
    spec.validate().context("synth: invalid parameters")?;

    let (dataset, truth) = gen_dataset(&spec).context("synth: generating the dataset")?;
    let dataset_dir = out_dir.join(artifacts::DATASET_DIR);
    kairos::ingest::write_dataset(&dataset_dir, &dataset).context("synth: writing dataset")?;
    for name in ["hackathons.csv", "projects.csv", "participants.csv", "events.csv"] {
        manifest.record_output(format!("{}/{name}", artifacts::DATASET_DIR));
    }

    artifacts::write_json(&out_dir.join(artifacts::GROUND_TRUTH), &truth)?;
    manifest.record_output(artifacts::GROUND_TRUTH);

    // Participation counts carry the planted tail; the roster-derived
    // attendance counts cannot (rosters are small), so the sampled list is
    // written where fit-tail looks for it.
    let counts = gen_participation_counts(&spec).context("synth: participation counts")?;
    let rows: Vec<Vec<String>> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| vec![format!("x{i:06}"), c.to_string()])
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::PARTICIPATION),
        &["participant_id", "count"],
        &rows,
    )?;
    manifest.record_output(artifacts::PARTICIPATION);

    // Scaling pairs carry the planted productivity exponent; the relaxation
    // event stream keeps one actor per repository by construction, so the
    // two plants live in separate artifacts.
    let pairs = gen_scaling_pairs(&spec).context("synth: scaling pairs")?;
    let pair_rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|&(c, r)| vec![c.to_string(), r.to_string()])
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::SCALING_PAIRS),
        &["contributors", "output"],
        &pair_rows,
    )?;
    manifest.record_output(artifacts::SCALING_PAIRS);

    // A lexicon matching the planted themes, so the tagging stage can
    // recover planted_sdgs from the generated text alone.
    let mut lex_rows: Vec<Vec<String>> = Vec::new();
    for lexicon in synth_lexicons() {
        for (sdg, patterns) in &lexicon.entries {
            for pattern in patterns {
                lex_rows.push(vec![lexicon.name.clone(), sdg.to_string(), pattern.clone()]);
            }
        }
    }
    artifacts::write_csv(
        &out_dir.join(artifacts::SYNTH_LEXICONS),
        &["dictionary", "sdg", "pattern"],
        &lex_rows,
    )?;
    manifest.record_output(artifacts::SYNTH_LEXICONS);

    eprintln!(
        "synth: {} hackathons, {} events, {} participation counts, {} scaling pairs (seed {})",
        dataset.hackathons.len(),
        dataset.events.len(),
        counts.len(),
        pairs.len(),
        spec.seed,
    );
    Ok(())
}
