//! Repository linkage: normalize project repository URLs to `owner/repo`
//! form and attach each project's event stream.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::model::{Project, RepoEvent};

/// Events grouped per project id. Every project appears as a key; projects
/// without a resolvable repository map to empty lists.
pub type LinkedEvents = BTreeMap<String, Vec<RepoEvent>>;

/// Linkage coverage counters.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LinkReport {
    pub projects_total: usize,
    /// Projects carrying any repository locator at all.
    pub projects_with_url: usize,
    /// Projects whose locator normalized to `owner/repo`.
    pub projects_resolvable: usize,
    /// projects_resolvable / projects_total (0 when there are no projects).
    pub resolvable_fraction: f64,
    /// Distinct repositories shared by at least one project and one event.
    pub repos_matched: usize,
    /// Events that reached at least one project.
    pub events_matched: usize,
}

/// Normalize a repository locator to lowercase `owner/repo`.
///
/// Accepts https/http/git/ssh URLs, scp-style `git@host:owner/repo`, bare
/// `host/owner/repo`, and plain `owner/repo`; strips `www.`, a trailing
/// `.git`, trailing slashes, queries and fragments. Deeper paths keep only
/// the first two segments. Returns `None` when no owner/repo pair remains.
pub fn normalize_repo_url(url: &str) -> Option<String> {
    let mut rest = url.trim();
    if rest.is_empty() {
        return None;
    }
    for scheme in ["https://", "http://", "git://", "ssh://"] {
        if let Some(stripped) = strip_prefix_ignore_case(rest, scheme) {
            rest = stripped;
            break;
        }
    }
    // scp-style: user@host:path
    if let Some(at) = rest.find('@') {
        if !rest[..at].contains('/') {
            rest = &rest[at + 1..];
        }
    }
    let rest = rest.replace(':', "/");
    let rest = rest
        .split(['?', '#'])
        .next()
        .unwrap_or_default();

    let mut segments = rest.split('/').filter(|s| !s.is_empty());
    let first = segments.next()?;
    // A leading host (anything with a dot, e.g. github.com) is dropped.
    let (owner, repo) = if first.contains('.') {
        (segments.next()?, segments.next()?)
    } else {
        (first, segments.next()?)
    };
    let owner = owner.to_lowercase();
    let mut repo = repo.to_lowercase();
    if let Some(stripped) = repo.strip_suffix(".git") {
        repo = stripped.to_string();
    }
    if owner.is_empty() || repo.is_empty() {
        return None;
    }
    Some(format!("{owner}/{repo}"))
}

fn strip_prefix_ignore_case<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
        Some(&s[prefix.len()..])
    } else {
        None
    }
}

/// Normalize an event's `owner/repo` name for matching.
fn normalize_repo_name(name: &str) -> String {
    normalize_repo_url(name).unwrap_or_else(|| name.trim().to_lowercase())
}

/// Attach events to projects by exact normalized repository name.
///
/// Event order within each project follows the input event order, so the
/// mapping is deterministic.
pub fn link_repos(projects: &[Project], events: &[RepoEvent]) -> (LinkedEvents, LinkReport) {
    let mut by_repo: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, e) in events.iter().enumerate() {
        by_repo.entry(normalize_repo_name(&e.repo_name)).or_default().push(i);
    }

    let mut report = LinkReport {
        projects_total: projects.len(),
        ..LinkReport::default()
    };
    let mut matched_repos: std::collections::HashSet<&str> = std::collections::HashSet::new();
    let mut matched_events: std::collections::HashSet<usize> = std::collections::HashSet::new();

    let mut linked = LinkedEvents::new();
    for p in projects {
        let mut list = Vec::new();
        if let Some(url) = &p.repo_url {
            report.projects_with_url += 1;
            if let Some(norm) = normalize_repo_url(url) {
                report.projects_resolvable += 1;
                if let Some(indices) = by_repo.get(&norm) {
                    matched_repos.insert(by_repo.get_key_value(&norm).unwrap().0);
                    for &i in indices {
                        matched_events.insert(i);
                        list.push(events[i].clone());
                    }
                }
            }
        }
        linked.insert(p.id.clone(), list);
    }

    report.repos_matched = matched_repos.len();
    report.events_matched = matched_events.len();
    report.resolvable_fraction = if projects.is_empty() {
        0.0
    } else {
        report.projects_resolvable as f64 / projects.len() as f64
    };
    (linked, report)
}
