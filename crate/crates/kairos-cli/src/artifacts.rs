//! Artifact names, deterministic writers, and the run manifest.
//!
//! All output files live directly under the run's output directory (the
//! cleaned tables go into `dataset/`). Names are fixed constants so that
//! downstream stages, tests, and humans agree on where everything is.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Directory holding the cleaned tables (`hackathons.csv`, `projects.csv`,
/// `participants.csv`, `events.csv`).
pub const DATASET_DIR: &str = "dataset";
pub const QC_REPORT: &str = "qc_report.json";
pub const SKIP_REPORT: &str = "skip_report.json";
pub const LINK_REPORT: &str = "link_report.json";
pub const PARTICIPATION: &str = "participation_counts.csv";
pub const TAGS: &str = "tags.csv";
pub const COVERAGE: &str = "coverage_by_year.csv";
pub const TREND: &str = "trend.json";
pub const STACK_ACTIVITY: &str = "stacked_series.csv";
pub const STACK_CREATIONS_SUM: &str = "repo_creations_sum.csv";
pub const STACK_CREATIONS_MEAN: &str = "repo_creations_mean.csv";
pub const RELAXATION_FIT: &str = "relaxation_fit.json";
pub const RELAXATION_BINNED: &str = "relaxation_binned.csv";
pub const CASCADE: &str = "cascade_class.json";
pub const TAIL_FIT: &str = "tail_fit.json";
pub const CCDF: &str = "ccdf.csv";
pub const MOMENTS: &str = "moments.json";
pub const SCALING_FIT: &str = "scaling_fit.json";
pub const SCALING_WINDOWS: &str = "scaling_windows.csv";
pub const SCALING_PAIRS: &str = "scaling_pairs.csv";
pub const NEWCOMER_RATIOS: &str = "newcomer_ratios.csv";
pub const NEWCOMER_SUMMARY: &str = "newcomer_summary.json";
pub const RATIO_VS_SIZE: &str = "ratio_vs_size.csv";
pub const GROWTH: &str = "growth.json";
pub const ENRICHMENT: &str = "enrichment.csv";
pub const DENDROGRAM: &str = "dendrogram.json";
pub const LEAF_ORDER: &str = "leaf_order.txt";
pub const GROUND_TRUTH: &str = "ground_truth.json";
pub const SYNTH_LEXICONS: &str = "synth_lexicons.csv";
pub const REPORT: &str = "report.md";
pub const MANIFEST: &str = "manifest.json";

/// Resolve `name` under `dir`, failing with a message that says which
/// subcommand produces the file when it is missing.
pub fn require(dir: &Path, name: &str, produced_by: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    if !path.is_file() {
        bail!(
            "missing {}: run `kairos {produced_by}` first to produce it",
            path.display()
        );
    }
    Ok(path)
}

/// SHA-256 of a file's bytes, hex-encoded.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path)
        .with_context(|| format!("cannot open {} for hashing", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// Round every float inside a JSON value to nine significant digits;
/// non-finite floats become `null`.
pub fn round_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                *value = kairos::emit::json_num(n.as_f64().unwrap());
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Serialize `data` as pretty JSON with rounded floats and a trailing
/// newline. Object keys are emitted in sorted order (the JSON values use a
/// sorted map internally), so output bytes are stable.
pub fn write_json<T: Serialize>(path: &Path, data: &T) -> Result<()> {
    let mut value = serde_json::to_value(data)
        .with_context(|| format!("cannot serialize {}", path.display()))?;
    round_floats(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Write a CSV file from pre-formatted string rows. Floats should be
/// formatted with [`kairos::emit::fmt_sig9`] by the caller.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Format a float for CSV output (nine significant digits, shortest form).
pub fn f(x: f64) -> String {
    kairos::emit::fmt_sig9(x)
}

/// Record of one CLI invocation: what ran, with which effective settings,
/// over which input files (content-addressed), producing which outputs.
///
/// The `timestamp` is the only nondeterministic byte sequence any command
/// writes; everything else re-runs byte-identically.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub timestamp: String,
    pub config: serde_json::Value,
    /// Input path -> SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    /// Artifact names written into the output directory, sorted.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            config,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Hash an input file and remember it.
    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        self.inputs
            .insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Remember an artifact (a path relative to the output directory).
    pub fn record_output(&mut self, name: impl Into<String>) {
        let name = name.into();
        if !self.outputs.contains(&name) {
            self.outputs.push(name);
        }
    }

    /// Write `manifest.json` into the output directory.
    pub fn write(&mut self, out_dir: &Path) -> Result<()> {
        self.outputs.sort();
        write_json(&out_dir.join(MANIFEST), self)
    }
}

/// Create the output directory if needed and return it.
pub fn ensure_out_dir(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_artifact_names_the_producing_command() {
        let dir = tempfile::tempdir().unwrap();
        let err = require(dir.path(), TAGS, "tag").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("tags.csv"), "{msg}");
        assert!(msg.contains("kairos tag"), "{msg}");
    }

    #[test]
    fn json_floats_are_rounded_and_nonfinite_is_null() {
        let mut v = serde_json::json!({
            "a": 0.1 + 0.2,
            "b": [f64::NAN, 1.0],
            "c": {"d": 7},
        });
        round_floats(&mut v);
        assert_eq!(v["a"], serde_json::json!(0.3));
        assert_eq!(v["b"][0], serde_json::Value::Null);
        assert_eq!(v["c"]["d"], serde_json::json!(7));
    }

    #[test]
    fn sha256_matches_known_vector() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x");
        fs::write(&path, b"abc").unwrap();
        assert_eq!(
            sha256_file(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
