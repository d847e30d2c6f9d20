//! Hackathon/project/participant metadata loaders and the clean-dataset
//! writer.
//!
//! Metadata arrives as CSV tables or JSON arrays, chosen by file extension.
//! CSV columns:
//!
//! - `hackathons.csv`: `id, start_date, theme_text, tags, criteria_text,
//!   project_ids, participant_ids`
//! - `projects.csv`: `id, hackathon_id, repo_url, technologies, member_ids`
//! - `participants.csv`: `id, hackathon_ids`
//! - `events.csv`: `event_id, event_type, repo_name, actor_id, created_at,
//!   public, push_size`
//!
//! List-valued cells are `|`-separated (the pipe is reserved; empty cell =
//! empty list). Optional cells (`hackathon_id`, `repo_url`, `push_size`) are
//! empty when absent. Dates are `YYYY-MM-DD`; timestamps RFC 3339 UTC. JSON
//! arrays carry the same field names with native lists and nulls.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use chrono::{DateTime, NaiveDate, SecondsFormat, Utc};

use crate::error::{Error, Result};
use crate::model::{Dataset, Hackathon, Participant, Project, RepoEvent};

/// Split a `|`-separated cell; empty cells mean the empty list.
fn parse_list(cell: &str) -> Vec<String> {
    if cell.is_empty() {
        Vec::new()
    } else {
        cell.split('|').map(str::to_owned).collect()
    }
}

fn join_list(items: &[String]) -> String {
    items.join("|")
}

fn opt_cell(cell: &str) -> Option<String> {
    if cell.is_empty() {
        None
    } else {
        Some(cell.to_owned())
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn record_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Record {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Iterate CSV records with their 1-based line numbers and required columns.
fn csv_records(
    path: &Path,
    columns: &[&str],
) -> Result<Vec<(usize, Vec<String>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_reader(BufReader::new(file));
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let index_of = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| record_err(path, 1, format!("missing column {name:?}")))
    };
    let indices: Vec<usize> = columns.iter().map(|c| index_of(c)).collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(rows.len() + 2);
        let cells = indices
            .iter()
            .map(|&i| record.get(i).unwrap_or_default().to_owned())
            .collect();
        rows.push((line, cells));
    }
    Ok(rows)
}

fn load_json_array<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn load_hackathons(path: &Path) -> Result<Vec<Hackathon>> {
    if is_json(path) {
        return load_json_array(path);
    }
    let columns = [
        "id",
        "start_date",
        "theme_text",
        "tags",
        "criteria_text",
        "project_ids",
        "participant_ids",
    ];
    csv_records(path, &columns)?
        .into_iter()
        .map(|(line, c)| {
            if c[0].is_empty() {
                return Err(record_err(path, line, "empty hackathon id"));
            }
            let start_date = NaiveDate::parse_from_str(&c[1], "%Y-%m-%d")
                .map_err(|e| record_err(path, line, format!("bad start_date {:?}: {e}", c[1])))?;
            Ok(Hackathon {
                id: c[0].clone(),
                start_date,
                theme_text: c[2].clone(),
                tags: parse_list(&c[3]),
                criteria_text: c[4].clone(),
                project_ids: parse_list(&c[5]),
                participant_ids: parse_list(&c[6]),
            })
        })
        .collect()
}

pub fn load_projects(path: &Path) -> Result<Vec<Project>> {
    if is_json(path) {
        return load_json_array(path);
    }
    let columns = ["id", "hackathon_id", "repo_url", "technologies", "member_ids"];
    csv_records(path, &columns)?
        .into_iter()
        .map(|(line, c)| {
            if c[0].is_empty() {
                return Err(record_err(path, line, "empty project id"));
            }
            Ok(Project {
                id: c[0].clone(),
                hackathon_id: opt_cell(&c[1]),
                repo_url: opt_cell(&c[2]),
                technologies: parse_list(&c[3]),
                member_ids: parse_list(&c[4]),
            })
        })
        .collect()
}

pub fn load_participants(path: &Path) -> Result<Vec<Participant>> {
    if is_json(path) {
        return load_json_array(path);
    }
    let columns = ["id", "hackathon_ids"];
    csv_records(path, &columns)?
        .into_iter()
        .map(|(line, c)| {
            if c[0].is_empty() {
                return Err(record_err(path, line, "empty participant id"));
            }
            Ok(Participant {
                id: c[0].clone(),
                hackathon_ids: parse_list(&c[1]),
            })
        })
        .collect()
}

/// Load events from the clean-table CSV layout (not the archive NDJSON).
pub fn load_events_csv(path: &Path) -> Result<Vec<RepoEvent>> {
    let columns = [
        "event_id",
        "event_type",
        "repo_name",
        "actor_id",
        "created_at",
        "public",
        "push_size",
    ];
    csv_records(path, &columns)?
        .into_iter()
        .map(|(line, c)| {
            let created_at = DateTime::parse_from_rfc3339(&c[4])
                .map_err(|e| record_err(path, line, format!("bad created_at {:?}: {e}", c[4])))?
                .with_timezone(&Utc);
            let public = match c[5].as_str() {
                "true" | "" => true,
                "false" => false,
                other => return Err(record_err(path, line, format!("bad public flag {other:?}"))),
            };
            let push_size = match c[6].as_str() {
                "" => None,
                s => Some(s.parse::<u32>().map_err(|e| {
                    record_err(path, line, format!("bad push_size {s:?}: {e}"))
                })?),
            };
            Ok(RepoEvent {
                event_id: c[0].clone(),
                event_type: c[1].clone(),
                repo_name: c[2].clone(),
                actor_id: c[3].clone(),
                created_at,
                public,
                push_size,
            })
        })
        .collect()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn write_record<W: std::io::Write>(
    writer: &mut csv::Writer<W>,
    path: &Path,
    record: &[String],
) -> Result<()> {
    writer.write_record(record).map_err(|e| Error::csv(path, e))
}

/// Write a dataset as the four clean CSV tables under `dir`.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let path = dir.join("hackathons.csv");
    let mut w = csv_writer(&path)?;
    write_record(
        &mut w,
        &path,
        &[
            "id".into(),
            "start_date".into(),
            "theme_text".into(),
            "tags".into(),
            "criteria_text".into(),
            "project_ids".into(),
            "participant_ids".into(),
        ],
    )?;
    for h in &dataset.hackathons {
        write_record(
            &mut w,
            &path,
            &[
                h.id.clone(),
                h.start_date.format("%Y-%m-%d").to_string(),
                h.theme_text.clone(),
                join_list(&h.tags),
                h.criteria_text.clone(),
                join_list(&h.project_ids),
                join_list(&h.participant_ids),
            ],
        )?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("projects.csv");
    let mut w = csv_writer(&path)?;
    write_record(
        &mut w,
        &path,
        &[
            "id".into(),
            "hackathon_id".into(),
            "repo_url".into(),
            "technologies".into(),
            "member_ids".into(),
        ],
    )?;
    for p in &dataset.projects {
        write_record(
            &mut w,
            &path,
            &[
                p.id.clone(),
                p.hackathon_id.clone().unwrap_or_default(),
                p.repo_url.clone().unwrap_or_default(),
                join_list(&p.technologies),
                join_list(&p.member_ids),
            ],
        )?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("participants.csv");
    let mut w = csv_writer(&path)?;
    write_record(&mut w, &path, &["id".into(), "hackathon_ids".into()])?;
    for p in &dataset.participants {
        write_record(&mut w, &path, &[p.id.clone(), join_list(&p.hackathon_ids)])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("events.csv");
    let mut w = csv_writer(&path)?;
    write_record(
        &mut w,
        &path,
        &[
            "event_id".into(),
            "event_type".into(),
            "repo_name".into(),
            "actor_id".into(),
            "created_at".into(),
            "public".into(),
            "push_size".into(),
        ],
    )?;
    for e in &dataset.events {
        write_record(
            &mut w,
            &path,
            &[
                e.event_id.clone(),
                e.event_type.clone(),
                e.repo_name.clone(),
                e.actor_id.clone(),
                e.created_at.to_rfc3339_opts(SecondsFormat::Secs, true),
                e.public.to_string(),
                e.push_size.map(|s| s.to_string()).unwrap_or_default(),
            ],
        )?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    Ok(())
}

/// Load a dataset from the clean CSV layout written by [`write_dataset`].
/// `events.csv` is optional; a missing file means no events.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let events_path = dir.join("events.csv");
    Ok(Dataset {
        hackathons: load_hackathons(&dir.join("hackathons.csv"))?,
        projects: load_projects(&dir.join("projects.csv"))?,
        participants: load_participants(&dir.join("participants.csv"))?,
        events: if events_path.exists() {
            load_events_csv(&events_path)?
        } else {
            Vec::new()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn sample_dataset() -> Dataset {
        Dataset {
            hackathons: vec![Hackathon {
                id: "h1".into(),
                start_date: NaiveDate::from_ymd_opt(2020, 3, 14).unwrap(),
                theme_text: "clean water, for everyone".into(),
                tags: vec!["water".into(), "open source".into()],
                criteria_text: String::new(),
                project_ids: vec!["p1".into(), "p2".into()],
                participant_ids: vec!["u1".into()],
            }],
            projects: vec![
                Project {
                    id: "p1".into(),
                    hackathon_id: Some("h1".into()),
                    repo_url: Some("https://github.com/Owner/Repo.git".into()),
                    technologies: vec!["rust".into()],
                    member_ids: vec!["u1".into()],
                },
                Project {
                    id: "p2".into(),
                    hackathon_id: None,
                    repo_url: None,
                    technologies: vec![],
                    member_ids: vec![],
                },
            ],
            participants: vec![Participant {
                id: "u1".into(),
                hackathon_ids: vec!["h1".into()],
            }],
            events: vec![RepoEvent {
                event_id: "e1".into(),
                event_type: "PushEvent".into(),
                repo_name: "owner/repo".into(),
                actor_id: "42".into(),
                created_at: Utc.with_ymd_and_hms(2020, 3, 15, 9, 0, 0).unwrap(),
                public: true,
                push_size: Some(3),
            }],
        }
    }

    #[test]
    fn csv_round_trip_preserves_the_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let dataset = sample_dataset();
        write_dataset(dir.path(), &dataset).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back, dataset);
    }

    #[test]
    fn json_arrays_load_through_the_same_interface() {
        let dir = tempfile::tempdir().unwrap();
        let dataset = sample_dataset();
        let path = dir.path().join("hackathons.json");
        std::fs::write(&path, serde_json::to_string(&dataset.hackathons).unwrap()).unwrap();
        assert_eq!(load_hackathons(&path).unwrap(), dataset.hackathons);

        let path = dir.path().join("projects.json");
        std::fs::write(&path, serde_json::to_string(&dataset.projects).unwrap()).unwrap();
        assert_eq!(load_projects(&path).unwrap(), dataset.projects);
    }

    #[test]
    fn bad_dates_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hackathons.csv");
        std::fs::write(
            &path,
            "id,start_date,theme_text,tags,criteria_text,project_ids,participant_ids\n\
             h1,2020-01-01,,,,,\n\
             h2,Jan 2020,,,,,\n",
        )
        .unwrap();
        match load_hackathons(&path) {
            Err(Error::Record { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("start_date"));
            }
            other => panic!("expected record error, got {other:?}"),
        }
    }

    #[test]
    fn missing_columns_are_reported_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("projects.csv");
        std::fs::write(&path, "id,hackathon_id\np1,h1\n").unwrap();
        let err = load_projects(&path).unwrap_err();
        assert!(err.to_string().contains("repo_url"));
    }

    #[test]
    fn empty_cells_mean_absent_or_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("projects.csv");
        std::fs::write(
            &path,
            "id,hackathon_id,repo_url,technologies,member_ids\np9,,,,\n",
        )
        .unwrap();
        let projects = load_projects(&path).unwrap();
        assert_eq!(projects[0].hackathon_id, None);
        assert_eq!(projects[0].repo_url, None);
        assert!(projects[0].technologies.is_empty());
        assert!(projects[0].member_ids.is_empty());
    }
}
