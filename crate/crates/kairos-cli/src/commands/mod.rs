//! One module per subcommand, plus the shared artifact loaders they use to
//! consume each other's outputs.

pub mod community;
pub mod enrich;
pub mod fit_decay;
pub mod fit_scaling;
pub mod fit_tail;
pub mod ingest;
pub mod report;
pub mod run;
pub mod stack;
pub mod synth;
pub mod tag;

use std::path::Path;

use anyhow::{bail, Context, Result};
use kairos::dynamics::{Aggregate, Normalization, StackedSeries};
use kairos::model::Dataset;
use kairos::sdg::{SdgTagSet, N_SDGS};

use crate::artifacts::{self, Manifest};

/// Load the cleaned tables from `<out_dir>/dataset`, recording each file as
/// a manifest input. Missing tables point the user at `kairos ingest`.
pub(crate) fn load_clean_dataset(out_dir: &Path, manifest: &mut Manifest) -> Result<Dataset> {
    let dir = out_dir.join(artifacts::DATASET_DIR);
    for name in ["hackathons.csv", "projects.csv", "participants.csv"] {
        let path = artifacts::require(&dir, name, "ingest")?;
        manifest.record_input(&path)?;
    }
    let events = dir.join("events.csv");
    if events.is_file() {
        manifest.record_input(&events)?;
    }
    kairos::ingest::load_dataset(&dir).context("loading the cleaned dataset")
}

/// Read a counts file: one positive integer per data row, taken from the
/// last comma-separated field so both bare lists and `id,count` tables work.
/// A single leading non-numeric line is treated as a header.
pub(crate) fn read_counts(path: &Path) -> Result<Vec<u64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<u64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => {} // header row
            Err(_) => bail!(
                "{} line {}: expected an integer count, got {field:?}",
                path.display(),
                i + 1
            ),
        }
    }
    if values.is_empty() {
        bail!("{} holds no counts", path.display());
    }
    Ok(values)
}

/// Read (contributors, output) pairs from a CSV with those two columns.
pub(crate) fn read_pairs(path: &Path) -> Result<Vec<(u64, u64)>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).with_context(|| {
            format!("{} is missing the {name:?} column", path.display())
        })
    };
    let (c_col, r_col) = (col("contributors")?, col("output")?);
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |idx: usize| -> Result<u64> {
            record
                .get(idx)
                .unwrap_or_default()
                .trim()
                .parse::<u64>()
                .with_context(|| format!("{} data row {}: bad integer", path.display(), i + 1))
        };
        pairs.push((parse(c_col)?, parse(r_col)?));
    }
    if pairs.is_empty() {
        bail!("{} holds no pairs", path.display());
    }
    Ok(pairs)
}

/// Write a stacked series as CSV, including its stacking metadata so the
/// file round-trips through [`read_series`].
pub(crate) fn write_series(path: &Path, series: &StackedSeries) -> Result<()> {
    let normalization = match series.normalization {
        Normalization::None => "none",
        Normalization::PerPeak => "per-peak",
    };
    let aggregate = match series.aggregate {
        Aggregate::Sum => "sum",
        Aggregate::Mean => "mean",
    };
    let rows: Vec<Vec<String>> = series
        .offsets
        .iter()
        .zip(&series.values)
        .map(|(&o, &v)| {
            vec![
                o.to_string(),
                artifacts::f(v),
                series.n_stacked.to_string(),
                normalization.to_string(),
                aggregate.to_string(),
            ]
        })
        .collect();
    artifacts::write_csv(
        path,
        &["offset", "value", "n_stacked", "normalization", "aggregate"],
        &rows,
    )
}

/// Read a stacked series back from [`write_series`] output.
pub(crate) fn read_series(path: &Path) -> Result<StackedSeries> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).with_context(|| {
            format!("{} is missing the {name:?} column", path.display())
        })
    };
    let (c_off, c_val, c_n, c_norm, c_agg) = (
        col("offset")?,
        col("value")?,
        col("n_stacked")?,
        col("normalization")?,
        col("aggregate")?,
    );
    let mut offsets = Vec::new();
    let mut values = Vec::new();
    let mut n_stacked = 0usize;
    let mut normalization = Normalization::None;
    let mut aggregate = Aggregate::Sum;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let cell = |idx: usize| record.get(idx).unwrap_or_default().trim().to_string();
        let row_err = |what: &str| {
            anyhow::anyhow!("{} data row {}: bad {what}", path.display(), i + 1)
        };
        offsets.push(cell(c_off).parse::<i64>().map_err(|_| row_err("offset"))?);
        values.push(cell(c_val).parse::<f64>().map_err(|_| row_err("value"))?);
        n_stacked = cell(c_n).parse::<usize>().map_err(|_| row_err("n_stacked"))?;
        normalization = match cell(c_norm).as_str() {
            "none" => Normalization::None,
            "per-peak" => Normalization::PerPeak,
            other => bail!("{} data row {}: unknown normalization {other:?}", path.display(), i + 1),
        };
        aggregate = match cell(c_agg).as_str() {
            "sum" => Aggregate::Sum,
            "mean" => Aggregate::Mean,
            other => bail!("{} data row {}: unknown aggregate {other:?}", path.display(), i + 1),
        };
    }
    if offsets.is_empty() {
        bail!("{} holds no series rows", path.display());
    }
    Ok(StackedSeries {
        offsets,
        values,
        n_stacked,
        normalization,
        aggregate,
    })
}

/// Rebuild per-hackathon tag sets from `tags.csv` (which only stores rows
/// with raw hits; pattern details are not round-tripped).
pub(crate) fn read_tagsets(path: &Path) -> Result<Vec<SdgTagSet>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).with_context(|| {
            format!("{} is missing the {name:?} column", path.display())
        })
    };
    let (c_id, c_sdg, c_raw, c_cor, c_al) = (
        col("hackathon_id")?,
        col("sdg")?,
        col("raw")?,
        col("corrected")?,
        col("aligned")?,
    );
    // Insertion-ordered: tags.csv rows are grouped by hackathon already.
    let mut order: Vec<String> = Vec::new();
    let mut sets: std::collections::HashMap<String, SdgTagSet> = std::collections::HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let cell = |idx: usize| record.get(idx).unwrap_or_default().trim().to_string();
        let row_err = |what: &str| {
            anyhow::anyhow!("{} data row {}: bad {what}", path.display(), i + 1)
        };
        let id = cell(c_id);
        if id.is_empty() {
            bail!("{} data row {}: empty hackathon_id", path.display(), i + 1);
        }
        let sdg: usize = cell(c_sdg).parse().map_err(|_| row_err("sdg"))?;
        if !(1..=N_SDGS).contains(&sdg) {
            bail!("{} data row {}: sdg out of range", path.display(), i + 1);
        }
        let raw: u64 = cell(c_raw).parse().map_err(|_| row_err("raw"))?;
        let corrected: f64 = cell(c_cor).parse().map_err(|_| row_err("corrected"))?;
        let aligned: bool = cell(c_al).parse().map_err(|_| row_err("aligned"))?;
        let set = sets.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            SdgTagSet {
                hackathon_id: id,
                raw: [0; N_SDGS],
                corrected: [0.0; N_SDGS],
                aligned: [false; N_SDGS],
                matches: Vec::new(),
            }
        });
        set.raw[sdg - 1] = raw;
        set.corrected[sdg - 1] = corrected;
        set.aligned[sdg - 1] = aligned;
    }
    Ok(order.into_iter().map(|id| sets.remove(&id).unwrap()).collect())
}
