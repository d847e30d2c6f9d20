//! Superlinear productivity scaling: output volume R against the number of
//! active contributors c, fitted as `R ~ c^beta` across repo-time windows.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::LinkedEvents;
use crate::stats;

/// Window length used when none is given.
pub const DEFAULT_SCALING_WINDOW_DAYS: i64 = 5;

/// Fitted scaling exponent for `R ~ c^beta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub beta: f64,
    pub beta_stderr: f64,
    pub r_squared: f64,
    /// Window length, in days, the (c, R) pairs were aggregated over.
    pub window_days: i64,
    /// Number of windows that entered the fit.
    pub n_windows: usize,
}

/// Fit the exponent from pre-aggregated (contributors, output) pairs.
///
/// Both coordinates must be positive; the fit runs on log10 of each. Pairs
/// are sorted first so the result is independent of input order.
pub fn fit_scaling_pairs(pairs: &[(u64, u64)], window_days: i64) -> Result<ScalingFit> {
    if pairs.iter().any(|&(c, r)| c == 0 || r == 0) {
        return Err(Error::InvalidInput(
            "scaling pairs must have at least one contributor and one unit of output".into(),
        ));
    }
    if pairs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} windows with activity; the scaling fit needs at least 3",
            pairs.len()
        )));
    }
    let mut sorted: Vec<(u64, u64)> = pairs.to_vec();
    sorted.sort_unstable();
    let log_c: Vec<f64> = sorted.iter().map(|&(c, _)| (c as f64).log10()).collect();
    let log_r: Vec<f64> = sorted.iter().map(|&(_, r)| (r as f64).log10()).collect();
    let fit = stats::fit_line(&log_c, &log_r)?;
    Ok(ScalingFit {
        beta: fit.slope,
        beta_stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        window_days,
        n_windows: sorted.len(),
    })
}

/// Aggregate per-repo-time-window (contributors, output) pairs.
///
/// Each repo's timeline is tiled into consecutive `window_days`-day windows
/// starting at its first observed event; within a window, c counts distinct
/// actor identities and R sums commit counts. Windows with no contributors
/// or no commits are dropped (they carry no information on a log scale).
/// Pairs come back sorted, so the result only depends on the event multiset.
pub fn productivity_windows(linked: &LinkedEvents, window_days: i64) -> Result<Vec<(u64, u64)>> {
    if window_days < 1 {
        return Err(Error::InvalidParameter {
            name: "window_days",
            reason: format!("must be at least 1, got {window_days}"),
        });
    }
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for events in linked.values() {
        if events.is_empty() {
            continue;
        }
        let first_day = events.iter().map(|e| e.day()).min().unwrap();
        // (window index) -> (distinct actors, summed commits)
        let mut windows: BTreeMap<i64, (HashSet<&str>, u64)> = BTreeMap::new();
        for event in events {
            let offset = (event.day() - first_day).num_days();
            let entry = windows.entry(offset / window_days).or_default();
            if !event.actor_id.is_empty() {
                entry.0.insert(event.actor_id.as_str());
            }
            entry.1 += event.commit_count();
        }
        for (actors, commits) in windows.into_values() {
            if !actors.is_empty() && commits > 0 {
                pairs.push((actors.len() as u64, commits));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientData(
            "no windows with both contributors and commits".into(),
        ));
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Tile event streams into windows (see [`productivity_windows`]) and fit.
pub fn fit_productivity_scaling(linked: &LinkedEvents, window_days: i64) -> Result<ScalingFit> {
    let pairs = productivity_windows(linked, window_days)?;
    fit_scaling_pairs(&pairs, window_days)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RepoEvent;
    use chrono::{TimeZone, Utc};

    fn push(repo: &str, actor: &str, day: i64, size: u32) -> RepoEvent {
        RepoEvent {
            event_id: format!("{repo}-{actor}-{day}"),
            event_type: "PushEvent".into(),
            repo_name: repo.into(),
            actor_id: actor.into(),
            created_at: Utc.with_ymd_and_hms(2021, 1, 1, 12, 0, 0).unwrap()
                + chrono::Duration::days(day),
            public: true,
            push_size: Some(size),
        }
    }

    #[test]
    fn linear_output_gives_unit_exponent() {
        let pairs: Vec<(u64, u64)> = (1..=30).map(|c| (c, c)).collect();
        let fit = fit_scaling_pairs(&pairs, 5).unwrap();
        assert!((fit.beta - 1.0).abs() < 1e-12, "beta = {}", fit.beta);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.n_windows, 30);
    }

    #[test]
    fn four_thirds_law_survives_integer_rounding() {
        let pairs: Vec<(u64, u64)> = (1..=50)
            .map(|c| (c, (c as f64).powf(4.0 / 3.0).round() as u64))
            .collect();
        let fit = fit_scaling_pairs(&pairs, 5).unwrap();
        assert!(
            (fit.beta - 4.0 / 3.0).abs() <= 0.03,
            "beta = {} ± {}",
            fit.beta,
            fit.beta_stderr
        );
    }

    #[test]
    fn pair_order_does_not_change_the_fit() {
        let mut pairs: Vec<(u64, u64)> = (1..=40).map(|c| (c, c * c)).collect();
        let forward = fit_scaling_pairs(&pairs, 5).unwrap();
        pairs.reverse();
        pairs.rotate_left(7);
        let shuffled = fit_scaling_pairs(&pairs, 5).unwrap();
        assert_eq!(forward, shuffled);
    }

    #[test]
    fn zero_coordinates_are_rejected() {
        assert!(fit_scaling_pairs(&[(0, 5), (2, 3), (3, 4)], 5).is_err());
        assert!(fit_scaling_pairs(&[(1, 0), (2, 3), (3, 4)], 5).is_err());
    }

    #[test]
    fn windows_aggregate_actors_and_commits() {
        // One repo, 5-day windows from its first event (day 0):
        //   window 0 (days 0–4): actors {a, b}, commits 3 + 2 = 5
        //   window 1 (days 5–9): actor {a}, commits 7
        let mut linked = LinkedEvents::new();
        linked.insert(
            "p1".into(),
            vec![
                push("r/one", "a", 0, 3),
                push("r/one", "b", 4, 2),
                push("r/one", "a", 6, 7),
            ],
        );
        // A second repo contributes one more window so the fit has 3 points.
        linked.insert("p2".into(), vec![push("r/two", "c", 0, 2), push("r/two", "d", 1, 2)]);

        let fit = fit_productivity_scaling(&linked, 5).unwrap();
        assert_eq!(fit.n_windows, 3);
        // Recover the pairs through an independent hand aggregation.
        let expected = vec![(1u64, 7u64), (2, 4), (2, 5)];
        let log_c: Vec<f64> = expected.iter().map(|&(c, _)| (c as f64).log10()).collect();
        let log_r: Vec<f64> = expected.iter().map(|&(_, r)| (r as f64).log10()).collect();
        let by_hand = stats::fit_line(&log_c, &log_r).unwrap();
        assert!((fit.beta - by_hand.slope).abs() < 1e-12);
    }

    #[test]
    fn non_push_events_count_contributors_but_not_commits() {
        let mut watch = push("r/one", "z", 2, 1);
        watch.event_type = "WatchEvent".into();
        watch.push_size = None;
        let mut linked = LinkedEvents::new();
        linked.insert(
            "p1".into(),
            vec![push("r/one", "a", 0, 4), watch.clone()],
        );
        linked.insert("p2".into(), vec![push("r/two", "b", 0, 2)]);
        linked.insert("p3".into(), vec![push("r/three", "c", 0, 3), push("r/three", "d", 3, 3)]);

        let fit = fit_productivity_scaling(&linked, 5).unwrap();
        // Window for p1 has two distinct actors (a, z) but only 4 commits.
        assert_eq!(fit.n_windows, 3);
        let expected = vec![(1u64, 2u64), (2, 4), (2, 6)];
        let log_c: Vec<f64> = expected.iter().map(|&(c, _)| (c as f64).log10()).collect();
        let log_r: Vec<f64> = expected.iter().map(|&(_, r)| (r as f64).log10()).collect();
        let by_hand = stats::fit_line(&log_c, &log_r).unwrap();
        assert!((fit.beta - by_hand.slope).abs() < 1e-12);
    }

    #[test]
    fn empty_mapping_is_an_error() {
        let linked = LinkedEvents::new();
        match fit_productivity_scaling(&linked, 5) {
            Err(Error::InsufficientData(msg)) => {
                assert!(msg.contains("contributors"))
            }
            other => panic!("expected insufficient-data error, got {other:?}"),
        }
    }
}
