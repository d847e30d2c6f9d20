//! Core dataset records: hackathons, projects, participants and repository
//! events, plus the container tying them together.

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

/// A hackathon record with its descriptive texts and linked ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hackathon {
    pub id: String,
    pub start_date: NaiveDate,
    #[serde(default)]
    pub theme_text: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub criteria_text: String,
    #[serde(default)]
    pub project_ids: Vec<String>,
    #[serde(default)]
    pub participant_ids: Vec<String>,
}

/// A submitted project, optionally pointing at a code repository.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub id: String,
    /// `None` when the record carries no hackathon submission at all.
    #[serde(default)]
    pub hackathon_id: Option<String>,
    #[serde(default)]
    pub repo_url: Option<String>,
    #[serde(default)]
    pub technologies: Vec<String>,
    #[serde(default)]
    pub member_ids: Vec<String>,
}

/// A participant identity; `hackathon_ids` is derived from the projects the
/// participant is a member of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participant {
    pub id: String,
    #[serde(default)]
    pub hackathon_ids: Vec<String>,
}

/// One public repository event from an archive stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepoEvent {
    pub event_id: String,
    pub event_type: String,
    /// Full repository name, `owner/repo`, kept verbatim; matching against
    /// project URLs normalizes case separately.
    pub repo_name: String,
    pub actor_id: String,
    pub created_at: DateTime<Utc>,
    pub public: bool,
    /// Number of commits in a push payload, when the event carries one.
    #[serde(default)]
    pub push_size: Option<u32>,
}

impl RepoEvent {
    /// UTC calendar day of the event.
    pub fn day(&self) -> NaiveDate {
        self.created_at.date_naive()
    }

    pub fn is_push(&self) -> bool {
        self.event_type == "PushEvent"
    }

    /// Commit weight of this event: push payload size when present, one per
    /// push event otherwise, zero for non-push events.
    pub fn commit_count(&self) -> u64 {
        if self.is_push() {
            self.push_size.map(u64::from).unwrap_or(1)
        } else {
            0
        }
    }
}

/// A full linked dataset. `events` may be empty for metadata-only analyses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub hackathons: Vec<Hackathon>,
    pub projects: Vec<Project>,
    pub participants: Vec<Participant>,
    pub events: Vec<RepoEvent>,
}

impl Dataset {
    pub fn is_empty(&self) -> bool {
        self.hackathons.is_empty() && self.projects.is_empty() && self.participants.is_empty()
    }
}
