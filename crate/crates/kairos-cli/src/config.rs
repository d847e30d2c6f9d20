//! Run configuration: a plain-text (TOML) file of documented keys, with
//! command-line flags taking precedence over file values, and file values
//! over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use kairos::synth::{CohortPlan, NoiseModel, SynthSpec};

/// Synthetic-corpus keys (the `[synth]` table).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: Option<u64>,
    pub n_hackathons: Option<usize>,
    pub alpha: Option<f64>,
    pub amplitude: Option<f64>,
    pub decay_days: Option<i64>,
    pub mu: Option<f64>,
    pub x_min: Option<u64>,
    pub n_participation: Option<usize>,
    pub beta: Option<f64>,
    pub scaling_c_max: Option<u64>,
    pub scaling_reps: Option<usize>,
    /// "noiseless" or "poisson".
    pub noise: Option<String>,
    /// Explicit newcomer schedule; entries are {size, newcomers}.
    pub cohorts: Option<Vec<CohortPlan>>,
}

/// Every key the configuration file understands. All keys are optional;
/// unset keys fall back to documented defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Directory with hackathons.csv / projects.csv / participants.csv
    /// (JSON array variants accepted) and optionally events.csv.
    pub input_dir: Option<PathBuf>,
    /// Event-stream files (NDJSON, optionally gzip-compressed).
    pub events: Option<Vec<PathBuf>>,
    /// Keyword lexicon CSV (dictionary, sdg, pattern).
    pub lexicons: Option<PathBuf>,
    /// Correction-vector file (CSV sdg,weight or JSON array of 17).
    pub correction: Option<PathBuf>,
    /// Where all artifacts are written.
    pub out_dir: Option<PathBuf>,
    /// Start years excluded by quality control.
    pub excluded_years: Option<Vec<i32>>,
    /// Corrected-score threshold for goal alignment.
    pub alignment_threshold: Option<f64>,
    /// Minimum fraction of hackathons a technology must appear at.
    pub min_prevalence: Option<f64>,
    /// Repo-creation / activity-peak tolerance in days.
    pub peak_window_days: Option<i64>,
    /// Stacking window [lo, hi] in days around the start date.
    pub stack_window: Option<[i64; 2]>,
    /// Decay-fit window [lo, hi] in day offsets.
    pub fit_window: Option<[i64; 2]>,
    /// Log-binning resolution for the decay fit.
    pub bins_per_decade: Option<u32>,
    /// Which stacked series the decay fit uses: "activity" or
    /// "repo-creations".
    pub series: Option<String>,
    /// Criticality reference exponent θ.
    pub theta: Option<f64>,
    /// Standard-error margin for the criticality classification.
    pub margin_sigmas: Option<f64>,
    /// Productivity window length in days.
    pub scaling_window_days: Option<i64>,
    /// Explicit tail cutoff; omitted means automatic selection.
    pub tail_x_min: Option<u64>,
    /// Logarithmic binning resolution for the ratio-vs-size curve.
    pub size_bins_per_decade: Option<u32>,
    /// Z-score matrix vectors before clustering distances.
    pub standardize: Option<bool>,
    /// Worker-thread cap (0 or unset: library default).
    pub threads: Option<usize>,
    pub synth: Option<SynthConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("cannot parse config file {}", path.display()))
    }

    /// Build the synthetic-corpus spec: flags → config → defaults.
    pub fn synth_spec(&self, flags: &SynthConfig) -> Result<SynthSpec> {
        let file = self.synth.clone().unwrap_or_default();
        let defaults = SynthSpec::default();
        let noise_name = flags.noise.clone().or(file.noise);
        let noise = match noise_name.as_deref() {
            None => defaults.noise,
            Some("poisson") => NoiseModel::Poisson,
            Some("noiseless") => NoiseModel::Noiseless,
            Some(other) => anyhow::bail!("unknown noise model {other:?}: use poisson or noiseless"),
        };
        Ok(SynthSpec {
            seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
            n_hackathons: flags
                .n_hackathons
                .or(file.n_hackathons)
                .unwrap_or(defaults.n_hackathons),
            alpha: flags.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            amplitude: flags.amplitude.or(file.amplitude).unwrap_or(defaults.amplitude),
            decay_days: flags.decay_days.or(file.decay_days).unwrap_or(defaults.decay_days),
            mu: flags.mu.or(file.mu).unwrap_or(defaults.mu),
            x_min: flags.x_min.or(file.x_min).unwrap_or(defaults.x_min),
            n_participation: flags
                .n_participation
                .or(file.n_participation)
                .unwrap_or(defaults.n_participation),
            beta: flags.beta.or(file.beta).unwrap_or(defaults.beta),
            scaling_c_max: flags
                .scaling_c_max
                .or(file.scaling_c_max)
                .unwrap_or(defaults.scaling_c_max),
            scaling_reps: flags
                .scaling_reps
                .or(file.scaling_reps)
                .unwrap_or(defaults.scaling_reps),
            noise,
            cohorts: flags.cohorts.clone().or(file.cohorts).unwrap_or_default(),
        })
    }
}
