//! Stacked daily series around hackathon start dates.

use std::collections::HashMap;

use chrono::NaiveDate;

use super::{Aggregate, Normalization, StackedSeries, DEFAULT_STACK_WINDOW};
use crate::error::{Error, Result};
use crate::ingest::LinkedEvents;
use crate::model::{Hackathon, Project};

/// The repo-creation stack in both emitted flavours.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StackPair {
    pub sum: StackedSeries,
    pub mean: StackedSeries,
}

fn window_or_default(window: Option<(i64, i64)>) -> Result<(i64, i64)> {
    let (lo, hi) = window.unwrap_or(DEFAULT_STACK_WINDOW);
    if lo > hi {
        return Err(Error::InvalidInput(format!(
            "stack window is empty: {lo}..{hi}"
        )));
    }
    Ok((lo, hi))
}

/// Earliest observed event day per project — the repo-creation proxy when
/// explicit creation events are unavailable (archives may begin mid-history).
fn creation_days<'a>(
    projects: &'a [Project],
    linked: &LinkedEvents,
) -> HashMap<&'a str, NaiveDate> {
    let mut map = HashMap::new();
    for p in projects {
        if let Some(events) = linked.get(&p.id) {
            if let Some(day) = events.iter().map(|e| e.day()).min() {
                map.insert(p.id.as_str(), day);
            }
        }
    }
    map
}

fn projects_by_hackathon<'a>(projects: &'a [Project]) -> HashMap<&'a str, Vec<&'a Project>> {
    let mut map: HashMap<&str, Vec<&Project>> = HashMap::new();
    for p in projects {
        if let Some(h) = p.hackathon_id.as_deref() {
            map.entry(h).or_default().push(p);
        }
    }
    map
}

/// Stack daily repository-creation counts over hackathons.
///
/// For each hackathon, every linked repository contributes one count at
/// offset = (its earliest event day − the hackathon start day). Counts are
/// summed across hackathons over the window (default −100..=700 days); the
/// per-hackathon mean of the same histogram is emitted alongside.
pub fn stack_repo_creations(
    hackathons: &[Hackathon],
    projects: &[Project],
    linked: &LinkedEvents,
    window: Option<(i64, i64)>,
) -> Result<StackPair> {
    let (lo, hi) = window_or_default(window)?;
    let created = creation_days(projects, linked);
    if created.is_empty() {
        return Err(Error::InsufficientData(
            "no project has linked events; nothing to stack".into(),
        ));
    }
    let by_hackathon = projects_by_hackathon(projects);

    let len = (hi - lo + 1) as usize;
    let mut sum = vec![0.0f64; len];
    let mut n_stacked = 0usize;
    for h in hackathons {
        let mut contributed = false;
        for p in by_hackathon.get(h.id.as_str()).into_iter().flatten() {
            if let Some(&day) = created.get(p.id.as_str()) {
                let offset = (day - h.start_date).num_days();
                if (lo..=hi).contains(&offset) {
                    sum[(offset - lo) as usize] += 1.0;
                    contributed = true;
                }
            }
        }
        if contributed {
            n_stacked += 1;
        }
    }
    if n_stacked == 0 {
        return Err(Error::InsufficientData(format!(
            "no repository creation falls inside the window {lo}..{hi}"
        )));
    }

    let offsets: Vec<i64> = (lo..=hi).collect();
    let mean: Vec<f64> = sum.iter().map(|v| v / n_stacked as f64).collect();
    Ok(StackPair {
        sum: StackedSeries {
            offsets: offsets.clone(),
            values: sum,
            n_stacked,
            normalization: Normalization::None,
            aggregate: Aggregate::Sum,
        },
        mean: StackedSeries {
            offsets,
            values: mean,
            n_stacked,
            normalization: Normalization::None,
            aggregate: Aggregate::Mean,
        },
    })
}

/// Stack per-peak-normalized daily event counts over hackathons.
///
/// Two filters gate a hackathon into the stack: only repositories created
/// no later than `peak_window_days` after the start date contribute events,
/// and the hackathon's resulting activity peak must itself lie within
/// ±`peak_window_days` of the start. Each qualifying hackathon's daily
/// series is divided by its own peak value, then averaged.
pub fn stack_event_activity(
    hackathons: &[Hackathon],
    projects: &[Project],
    linked: &LinkedEvents,
    peak_window_days: i64,
    window: Option<(i64, i64)>,
) -> Result<StackedSeries> {
    let (lo, hi) = window_or_default(window)?;
    let created = creation_days(projects, linked);
    let by_hackathon = projects_by_hackathon(projects);

    let len = (hi - lo + 1) as usize;
    let mut acc = vec![0.0f64; len];
    let mut n_stacked = 0usize;

    for h in hackathons {
        let mut daily = vec![0.0f64; len];
        let mut any = false;
        for p in by_hackathon.get(h.id.as_str()).into_iter().flatten() {
            let Some(&day) = created.get(p.id.as_str()) else {
                continue;
            };
            if (day - h.start_date).num_days() > peak_window_days {
                continue; // repo created too long after the start
            }
            for e in &linked[&p.id] {
                let offset = (e.day() - h.start_date).num_days();
                if (lo..=hi).contains(&offset) {
                    daily[(offset - lo) as usize] += 1.0;
                    any = true;
                }
            }
        }
        if !any {
            continue;
        }
        // Peak = first maximum; must sit within ±peak_window_days of start.
        let (peak_idx, &peak) = daily
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .unwrap();
        let peak_offset = peak_idx as i64 + lo;
        if peak_offset.abs() > peak_window_days || peak <= 0.0 {
            continue;
        }
        for (a, d) in acc.iter_mut().zip(&daily) {
            *a += d / peak;
        }
        n_stacked += 1;
    }

    if n_stacked == 0 {
        return Err(Error::InsufficientData(format!(
            "no hackathon passed the activity filters: repositories created within \
             {peak_window_days} days after start, and activity peak within \
             ±{peak_window_days} days of start"
        )));
    }
    let values: Vec<f64> = acc.iter().map(|v| v / n_stacked as f64).collect();
    Ok(StackedSeries {
        offsets: (lo..=hi).collect(),
        values,
        n_stacked,
        normalization: Normalization::PerPeak,
        aggregate: Aggregate::Mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RepoEvent;
    use chrono::{Days, TimeZone, Utc};

    fn hackathon(id: &str, start: &str) -> Hackathon {
        Hackathon {
            id: id.into(),
            start_date: start.parse().unwrap(),
            theme_text: String::new(),
            tags: vec![],
            criteria_text: String::new(),
            project_ids: vec![],
            participant_ids: vec![],
        }
    }

    fn project(id: &str, hackathon_id: &str) -> Project {
        Project {
            id: id.into(),
            hackathon_id: Some(hackathon_id.into()),
            repo_url: Some(format!("owner/{id}")),
            technologies: vec![],
            member_ids: vec![],
        }
    }

    fn events_on_days(project_id: &str, start: &str, day_counts: &[(i64, usize)]) -> Vec<RepoEvent> {
        let base: NaiveDate = start.parse().unwrap();
        let mut out = Vec::new();
        for &(offset, count) in day_counts {
            let day = if offset >= 0 {
                base.checked_add_days(Days::new(offset as u64)).unwrap()
            } else {
                base.checked_sub_days(Days::new((-offset) as u64)).unwrap()
            };
            for i in 0..count {
                out.push(RepoEvent {
                    event_id: format!("{project_id}-{offset}-{i}"),
                    event_type: "PushEvent".into(),
                    repo_name: format!("owner/{project_id}"),
                    actor_id: "a".into(),
                    created_at: Utc
                        .from_utc_datetime(&day.and_hms_opt(12, 0, 0).unwrap()),
                    public: true,
                    push_size: Some(1),
                });
            }
        }
        out
    }

    #[test]
    fn three_repos_on_start_day_stack_at_offset_zero() {
        let h = hackathon("h1", "2020-01-10");
        let projects: Vec<Project> = (0..3).map(|i| project(&format!("p{i}"), "h1")).collect();
        let mut linked = LinkedEvents::new();
        for p in &projects {
            linked.insert(p.id.clone(), events_on_days(&p.id, "2020-01-10", &[(0, 1)]));
        }
        let pair = stack_repo_creations(&[h], &projects, &linked, None).unwrap();
        assert_eq!(pair.sum.value_at(0), Some(3.0));
        assert_eq!(pair.sum.values.iter().sum::<f64>(), 3.0);
        assert_eq!(pair.sum.n_stacked, 1);
        assert_eq!(pair.mean.value_at(0), Some(3.0));
    }

    #[test]
    fn creation_is_the_earliest_event_day() {
        let h = hackathon("h1", "2020-01-10");
        let p = project("p0", "h1");
        let mut linked = LinkedEvents::new();
        linked.insert(
            "p0".into(),
            events_on_days("p0", "2020-01-10", &[(30, 2), (4, 1), (90, 1)]),
        );
        let pair = stack_repo_creations(&[h], &[p], &linked, None).unwrap();
        assert_eq!(pair.sum.value_at(4), Some(1.0));
        assert_eq!(pair.sum.value_at(30), Some(0.0));
    }

    #[test]
    fn planted_offsets_match_brute_force_histogramming() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut hackathons = Vec::new();
        let mut projects = Vec::new();
        let mut linked = LinkedEvents::new();
        let mut planted: Vec<i64> = Vec::new();
        for i in 0..10 {
            let h_id = format!("h{i}");
            hackathons.push(hackathon(&h_id, "2019-06-01"));
            for j in 0..rng.random_range(1..5usize) {
                let p_id = format!("p{i}-{j}");
                let offset = rng.random_range(-120..750i64);
                projects.push(project(&p_id, &h_id));
                linked.insert(
                    p_id.clone(),
                    events_on_days(&p_id, "2019-06-01", &[(offset, 1), (offset + 10, 1)]),
                );
                planted.push(offset);
            }
        }
        let pair = stack_repo_creations(&hackathons, &projects, &linked, None).unwrap();

        // Brute force: histogram the planted offsets over the window.
        let mut expect = std::collections::BTreeMap::new();
        for &o in &planted {
            if (-100..=700).contains(&o) {
                *expect.entry(o).or_insert(0.0) += 1.0;
            }
        }
        for (&offset, &count) in &expect {
            assert_eq!(pair.sum.value_at(offset), Some(count), "offset {offset}");
        }
        assert_eq!(
            pair.sum.values.iter().sum::<f64>(),
            expect.values().sum::<f64>()
        );
    }

    #[test]
    fn stacking_is_additive_over_disjoint_sets() {
        let mk = |tag: &str, offsets: &[i64]| {
            let h = hackathon(&format!("h-{tag}"), "2020-02-01");
            let mut projects = Vec::new();
            let mut linked = LinkedEvents::new();
            for (k, &o) in offsets.iter().enumerate() {
                let p_id = format!("p-{tag}-{k}");
                projects.push(project(&p_id, &h.id));
                linked.insert(p_id.clone(), events_on_days(&p_id, "2020-02-01", &[(o, 1)]));
            }
            (h, projects, linked)
        };
        let (h1, p1, l1) = mk("a", &[0, 3, 50]);
        let (h2, p2, l2) = mk("b", &[0, 7]);

        let sum_a = stack_repo_creations(&[h1.clone()], &p1, &l1, None).unwrap().sum;
        let sum_b = stack_repo_creations(&[h2.clone()], &p2, &l2, None).unwrap().sum;

        let mut all_projects = p1;
        all_projects.extend(p2);
        let mut all_linked = l1;
        all_linked.extend(l2);
        let combined = stack_repo_creations(&[h1, h2], &all_projects, &all_linked, None)
            .unwrap()
            .sum;
        for (i, &offset) in combined.offsets.iter().enumerate() {
            assert_eq!(
                combined.values[i],
                sum_a.value_at(offset).unwrap() + sum_b.value_at(offset).unwrap()
            );
        }
        assert_eq!(combined.n_stacked, 2);
    }

    #[test]
    fn empty_mapping_is_an_error() {
        let h = hackathon("h1", "2020-01-10");
        let p = project("p0", "h1");
        let linked = LinkedEvents::new();
        assert!(stack_repo_creations(&[h], &[p], &linked, None).is_err());
    }

    #[test]
    fn activity_on_start_day_only_normalizes_to_one() {
        let h = hackathon("h1", "2021-03-03");
        let p = project("p0", "h1");
        let mut linked = LinkedEvents::new();
        linked.insert("p0".into(), events_on_days("p0", "2021-03-03", &[(0, 5)]));
        let series = stack_event_activity(&[h], &[p], &linked, 3, None).unwrap();
        assert_eq!(series.value_at(0), Some(1.0));
        assert_eq!(series.values.iter().sum::<f64>(), 1.0);
        assert_eq!(series.normalization, Normalization::PerPeak);
    }

    #[test]
    fn late_created_repo_is_excluded_like_brute_force() {
        let h = hackathon("h1", "2021-03-03");
        let early = project("early", "h1");
        let late = project("late", "h1");
        let mut linked = LinkedEvents::new();
        linked.insert(
            "early".into(),
            events_on_days("early", "2021-03-03", &[(0, 4), (10, 2)]),
        );
        // Created 5 days after start: beyond the 3-day window.
        linked.insert(
            "late".into(),
            events_on_days("late", "2021-03-03", &[(5, 100)]),
        );
        let series = stack_event_activity(&[h], &[early, late], &linked, 3, None).unwrap();

        // Brute force with the exclusion applied by hand: only "early"
        // counts, peak 4 at offset 0.
        assert_eq!(series.value_at(0), Some(1.0));
        assert_eq!(series.value_at(10), Some(0.5));
        assert_eq!(series.value_at(5), Some(0.0));
    }

    #[test]
    fn off_start_peak_fails_the_filters_with_both_named() {
        let h = hackathon("h1", "2021-03-03");
        let p = project("p0", "h1");
        let mut linked = LinkedEvents::new();
        // Repo created on day 0 (passes filter 1) but peak lands on day 10.
        linked.insert(
            "p0".into(),
            events_on_days("p0", "2021-03-03", &[(0, 1), (10, 9)]),
        );
        let err = stack_event_activity(&[h], &[p], &linked, 3, None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("created within"), "message: {msg}");
        assert!(msg.contains("peak within"), "message: {msg}");
    }

    #[test]
    fn per_peak_normalization_ignores_uniform_scaling() {
        let offsets: &[(i64, usize)] = &[(0, 6), (1, 3), (4, 2), (20, 1)];
        let scaled: Vec<(i64, usize)> = offsets.iter().map(|&(o, c)| (o, c * 7)).collect();

        let build = |counts: &[(i64, usize)]| {
            let h = hackathon("h1", "2021-03-03");
            let p = project("p0", "h1");
            let mut linked = LinkedEvents::new();
            linked.insert("p0".into(), events_on_days("p0", "2021-03-03", counts));
            stack_event_activity(&[h], &[p], &linked, 3, None).unwrap()
        };
        let base = build(offsets);
        let bigger = build(&scaled);
        assert_eq!(base.values, bigger.values);
    }
}
