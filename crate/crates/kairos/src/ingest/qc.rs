//! Quality control: the fixed-order exclusion pipeline producing a clean,
//! fully linked dataset and an audit report.
//!
//! Rules run in a fixed order: (1) drop projects with no hackathon
//! submission; (2) drop projects whose hackathon is missing from the
//! hackathon table; (3) drop hackathons with zero remaining projects;
//! (4) drop participants that no remaining project lists as a member;
//! (5) drop projects held in incomplete-coverage years (a project's year is
//! its hackathon's start year), then cascade: hackathons and participants
//! left without projects by rule 5 are dropped too, so the pipeline is
//! idempotent — a second pass over its own output excludes nothing.
//!
//! Membership is defined by the project's `hackathon_id` foreign key and the
//! project's `member_ids`; the convenience id lists on hackathons and
//! participants are pruned afterwards so every surviving reference resolves.
//! Events pass through untouched (linkage happens downstream).

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::model::Dataset;

/// Which calendar years to exclude as incomplete coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcConfig {
    pub excluded_years: BTreeSet<i32>,
}

impl Default for QcConfig {
    fn default() -> Self {
        Self {
            excluded_years: BTreeSet::from([2009, 2022]),
        }
    }
}

/// Per-rule exclusion counts and before/after totals.
///
/// Stage arithmetic holds per entity class:
/// `before − (sum of that class's exclusions) = after`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QcReport {
    pub hackathons_before: usize,
    pub hackathons_after: usize,
    pub projects_before: usize,
    pub projects_after: usize,
    pub participants_before: usize,
    pub participants_after: usize,

    /// Rule 1: project has no hackathon submission at all.
    pub projects_without_hackathon: usize,
    /// Rule 2: project points at a hackathon absent from the table.
    pub projects_unresolvable_hackathon: usize,
    /// Rule 3: hackathon kept no projects after rules 1–2.
    pub hackathons_without_projects: usize,
    /// Rule 4: participant is a member of no remaining project.
    pub participants_without_projects: usize,
    /// Rule 5: project's hackathon starts in an excluded year.
    pub projects_excluded_years: usize,
    /// Rule 5 cascade: hackathon emptied by the year exclusion.
    pub hackathons_excluded_years: usize,
    /// Rule 5 cascade: participant left with no project by the year exclusion.
    pub participants_excluded_years: usize,

    pub excluded_years: Vec<i32>,
}

impl QcReport {
    /// True when a pass excluded nothing (the idempotence signature).
    pub fn is_clean_pass(&self) -> bool {
        self.projects_without_hackathon == 0
            && self.projects_unresolvable_hackathon == 0
            && self.hackathons_without_projects == 0
            && self.participants_without_projects == 0
            && self.projects_excluded_years == 0
            && self.hackathons_excluded_years == 0
            && self.participants_excluded_years == 0
    }
}

/// Run the five exclusion rules and prune cross-references.
///
/// Never fails: degenerate inputs yield an empty clean dataset with a full
/// report. Input order is preserved for every retained record.
pub fn apply_quality_control(dataset: &Dataset, config: &QcConfig) -> (Dataset, QcReport) {
    let mut report = QcReport {
        hackathons_before: dataset.hackathons.len(),
        projects_before: dataset.projects.len(),
        participants_before: dataset.participants.len(),
        excluded_years: config.excluded_years.iter().copied().collect(),
        ..QcReport::default()
    };

    // Hackathon table; first record wins if an id ever repeats.
    let mut hackathon_year: HashMap<&str, i32> = HashMap::new();
    for h in &dataset.hackathons {
        use chrono::Datelike;
        hackathon_year.entry(&h.id).or_insert_with(|| h.start_date.year());
    }

    // Rules 1–2: project-level reference checks.
    let mut projects: Vec<&crate::model::Project> = Vec::with_capacity(dataset.projects.len());
    for p in &dataset.projects {
        match &p.hackathon_id {
            None => report.projects_without_hackathon += 1,
            Some(h) if !hackathon_year.contains_key(h.as_str()) => {
                report.projects_unresolvable_hackathon += 1
            }
            Some(_) => projects.push(p),
        }
    }

    // Rule 3: hackathons must keep at least one project.
    let populated: HashSet<&str> = projects
        .iter()
        .map(|p| p.hackathon_id.as_deref().unwrap())
        .collect();
    let mut hackathons: Vec<&crate::model::Hackathon> = Vec::new();
    for h in &dataset.hackathons {
        if populated.contains(h.id.as_str()) {
            hackathons.push(h);
        } else {
            report.hackathons_without_projects += 1;
        }
    }

    // Rule 4: participants must belong to at least one remaining project.
    let members: HashSet<&str> = projects
        .iter()
        .flat_map(|p| p.member_ids.iter().map(String::as_str))
        .collect();
    let mut participants: Vec<&crate::model::Participant> = Vec::new();
    for u in &dataset.participants {
        if members.contains(u.id.as_str()) {
            participants.push(u);
        } else {
            report.participants_without_projects += 1;
        }
    }

    // Rule 5: incomplete-coverage years, with cascade so the result is
    // closed under a re-run.
    let in_excluded_year = |p: &crate::model::Project| {
        let year = hackathon_year[p.hackathon_id.as_deref().unwrap()];
        config.excluded_years.contains(&year)
    };
    let before = projects.len();
    projects.retain(|p| !in_excluded_year(p));
    report.projects_excluded_years = before - projects.len();

    let populated: HashSet<&str> = projects
        .iter()
        .map(|p| p.hackathon_id.as_deref().unwrap())
        .collect();
    let before = hackathons.len();
    hackathons.retain(|h| populated.contains(h.id.as_str()));
    report.hackathons_excluded_years = before - hackathons.len();

    let members: HashSet<&str> = projects
        .iter()
        .flat_map(|p| p.member_ids.iter().map(String::as_str))
        .collect();
    let before = participants.len();
    participants.retain(|u| members.contains(u.id.as_str()));
    report.participants_excluded_years = before - participants.len();

    // Prune convenience id lists so every reference in the clean dataset
    // resolves (and a re-run sees exactly the same structure).
    let retained_hackathons: HashSet<&str> = hackathons.iter().map(|h| h.id.as_str()).collect();
    let retained_participants: HashSet<&str> =
        participants.iter().map(|u| u.id.as_str()).collect();
    let project_owner: HashMap<&str, &str> = projects
        .iter()
        .map(|p| (p.id.as_str(), p.hackathon_id.as_deref().unwrap()))
        .collect();

    let clean = Dataset {
        hackathons: hackathons
            .iter()
            .map(|h| {
                let mut h = (*h).clone();
                h.project_ids
                    .retain(|pid| project_owner.get(pid.as_str()) == Some(&h.id.as_str()));
                h.participant_ids
                    .retain(|uid| retained_participants.contains(uid.as_str()));
                h
            })
            .collect(),
        projects: projects
            .iter()
            .map(|p| {
                let mut p = (*p).clone();
                p.member_ids
                    .retain(|uid| retained_participants.contains(uid.as_str()));
                p
            })
            .collect(),
        participants: participants
            .iter()
            .map(|u| {
                let mut u = (*u).clone();
                u.hackathon_ids
                    .retain(|hid| retained_hackathons.contains(hid.as_str()));
                u
            })
            .collect(),
        events: dataset.events.clone(),
    };

    report.hackathons_after = clean.hackathons.len();
    report.projects_after = clean.projects.len();
    report.participants_after = clean.participants.len();

    debug_assert_eq!(
        report.projects_before
            - report.projects_without_hackathon
            - report.projects_unresolvable_hackathon
            - report.projects_excluded_years,
        report.projects_after
    );
    debug_assert_eq!(
        report.hackathons_before
            - report.hackathons_without_projects
            - report.hackathons_excluded_years,
        report.hackathons_after
    );
    debug_assert_eq!(
        report.participants_before
            - report.participants_without_projects
            - report.participants_excluded_years,
        report.participants_after
    );

    (clean, report)
}
