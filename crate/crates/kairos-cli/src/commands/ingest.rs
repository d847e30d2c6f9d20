//! `kairos ingest`: load raw tables and event streams, apply quality
//! control, and write the cleaned dataset plus its reports.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use kairos::ingest::{
    apply_quality_control, link_repos, load_hackathons, load_participants, load_projects,
    read_events_from_paths, QcConfig, SkipReport,
};
use kairos::model::Dataset;
use serde::Serialize;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct IngestArgs {
    /// Directory holding hackathons.csv, projects.csv, participants.csv
    /// (events.csv optional alongside).
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    /// Event stream files (NDJSON, optionally .gz); may repeat.
    #[arg(long = "events")]
    pub events: Vec<PathBuf>,
    /// Calendar years to drop as incompletely covered (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub excluded_years: Option<Vec<i32>>,
}

/// Find `<stem>.csv` under the input directory.
fn table(dir: &Path, stem: &str) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.csv"));
    if path.is_file() {
        return Ok(path);
    }
    bail!(
        "ingest: {} not found; the input directory must hold hackathons.csv, \
         projects.csv, and participants.csv",
        path.display()
    );
}

pub fn run(
    cfg: &RunConfig,
    args: &IngestArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let input_dir = args
        .input_dir
        .clone()
        .or_else(|| cfg.input_dir.clone())
        .ok_or_else(|| {
            anyhow::anyhow!("ingest: no input directory (pass --input-dir or set input_dir)")
        })?;
    if !input_dir.is_dir() {
        bail!("ingest: input directory {} does not exist", input_dir.display());
    }
    let has_any = ["hackathons.csv", "projects.csv", "participants.csv"]
        .iter()
        .any(|n| input_dir.join(n).is_file());
    if !has_any {
        bail!(
            "ingest: input directory {} is empty of metadata tables; nothing to ingest",
            input_dir.display()
        );
    }

    let h_path = table(&input_dir, "hackathons")?;
    let p_path = table(&input_dir, "projects")?;
    let u_path = table(&input_dir, "participants")?;
    for path in [&h_path, &p_path, &u_path] {
        manifest.record_input(path)?;
    }

    // Event streams: explicit flags win, then config, then a conventional
    // events.csv next to the metadata tables.
    let event_paths: Vec<PathBuf> = if !args.events.is_empty() {
        args.events.clone()
    } else {
        cfg.events.clone().unwrap_or_default()
    };
    let events_csv = input_dir.join("events.csv");
    let (events, skip_report) = if !event_paths.is_empty() {
        for path in &event_paths {
            manifest.record_input(path)?;
        }
        read_events_from_paths(&event_paths).context("ingest: reading event streams")?
    } else if events_csv.is_file() {
        manifest.record_input(&events_csv)?;
        let events = kairos::ingest::load_events_csv(&events_csv)
            .context("ingest: reading events.csv")?;
        let report = SkipReport {
            lines_total: events.len() as u64,
            events_parsed: events.len() as u64,
            ..SkipReport::default()
        };
        (events, report)
    } else {
        (Vec::new(), SkipReport::default())
    };

    let raw = Dataset {
        hackathons: load_hackathons(&h_path).context("ingest: hackathons table")?,
        projects: load_projects(&p_path).context("ingest: projects table")?,
        participants: load_participants(&u_path).context("ingest: participants table")?,
        events,
    };

    let qc_config = match args.excluded_years.clone().or_else(|| cfg.excluded_years.clone()) {
        Some(years) => QcConfig {
            excluded_years: years.into_iter().collect(),
        },
        None => QcConfig::default(),
    };
    let (clean, qc_report) = apply_quality_control(&raw, &qc_config);
    let (_, link_report) = link_repos(&clean.projects, &clean.events);

    let dataset_dir = out_dir.join(artifacts::DATASET_DIR);
    kairos::ingest::write_dataset(&dataset_dir, &clean).context("ingest: writing dataset")?;
    for name in ["hackathons.csv", "projects.csv", "participants.csv", "events.csv"] {
        manifest.record_output(format!("{}/{name}", artifacts::DATASET_DIR));
    }

    artifacts::write_json(&out_dir.join(artifacts::QC_REPORT), &qc_report)?;
    manifest.record_output(artifacts::QC_REPORT);
    artifacts::write_json(&out_dir.join(artifacts::SKIP_REPORT), &skip_report)?;
    manifest.record_output(artifacts::SKIP_REPORT);
    artifacts::write_json(&out_dir.join(artifacts::LINK_REPORT), &link_report)?;
    manifest.record_output(artifacts::LINK_REPORT);

    // Participation intensity: hackathons attended per (cleaned) participant.
    let rows: Vec<Vec<String>> = clean
        .participants
        .iter()
        .map(|p| vec![p.id.clone(), p.hackathon_ids.len().to_string()])
        .collect();
    artifacts::write_csv(
        &out_dir.join(artifacts::PARTICIPATION),
        &["participant_id", "count"],
        &rows,
    )?;
    manifest.record_output(artifacts::PARTICIPATION);

    eprintln!(
        "ingest: {} hackathons, {} projects, {} participants kept; {} events parsed, {} lines skipped",
        qc_report.hackathons_after,
        qc_report.projects_after,
        qc_report.participants_after,
        skip_report.events_parsed,
        skip_report.lines_skipped,
    );
    Ok(())
}
