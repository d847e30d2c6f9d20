//! Ingest layer: event-stream parsing, metadata loading, quality control
//! and repository linkage.

pub mod events;
pub mod link;
pub mod metadata;
pub mod qc;

pub use events::{
    open_event_reader, read_events_from_path, read_events_from_paths, EventStream, SkipReport,
};
pub use link::{link_repos, normalize_repo_url, LinkReport, LinkedEvents};
pub use metadata::{
    load_dataset, load_events_csv, load_hackathons, load_participants, load_projects,
    write_dataset,
};
pub use qc::{apply_quality_control, QcConfig, QcReport};
