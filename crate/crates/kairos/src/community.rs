//! Newcomer inflow, its dependence on event size, and ecosystem growth.
//!
//! A participant is a *newcomer* at a hackathon when no earlier hackathon in
//! the corpus lists them. "Earlier" is strictly by start date: hackathons
//! sharing a start date do not see each other's rosters, because start dates
//! carry no intra-day order. One consequence worth knowing: the identity
//! Σ newcomers = distinct participants holds exactly unless someone debuts
//! at two same-day hackathons (they then count as new at both).

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Hackathon;
use crate::stats;

/// Number of equal-width histogram bins over the ratio range [0, 1].
pub const RATIO_HISTOGRAM_BINS: usize = 10;
/// Logarithmic binning resolution for the ratio-vs-size curve.
pub const DEFAULT_SIZE_BINS_PER_DECADE: u32 = 5;
/// Minimum corpus span, in weeks, for a growth fit.
pub const MIN_GROWTH_WEEKS: usize = 8;

/// Newcomer share of one hackathon's roster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HackathonRatio {
    pub hackathon_id: String,
    pub start_date: NaiveDate,
    /// Distinct participants on the roster.
    pub participants: usize,
    /// Participants never seen at any strictly earlier hackathon.
    pub newcomers: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Per-hackathon newcomer ratios plus corpus-level summaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewcomerStats {
    /// One entry per hackathon with ≥1 participant, in chronological order
    /// (ties broken by hackathon id).
    pub ratios: Vec<HackathonRatio>,
    pub median_ratio: f64,
    /// Equal-width histogram of ratios over [0, 1]; counts sum to
    /// `ratios.len()`.
    pub histogram: Vec<RatioBin>,
    /// Hackathons excluded for having an empty roster.
    pub skipped_without_participants: usize,
}

/// Mean newcomer ratio within one logarithmic size bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeBinPoint {
    /// Geometric mean of the bin's hackathon sizes.
    pub size: f64,
    pub n_hackathons: usize,
    pub mean_ratio: f64,
    /// Standard error of the mean ratio (0 when the bin holds one point).
    pub stderr: f64,
}

/// Weekly hackathon counts and their linear trend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthStats {
    /// Monday-agnostic weeks: week k covers days [7k, 7k+7) after the first
    /// start date in the corpus. Contiguous, zero-filled.
    pub first_week_start: NaiveDate,
    pub weekly_counts: Vec<u64>,
    /// OLS slope of counts on 0-based week index.
    pub slope: f64,
    /// slope / mean weekly count.
    pub relative_weekly_rate: f64,
    pub r_squared: f64,
    /// R² of the same fit on ln counts; only available when every week has
    /// at least one hackathon.
    pub r_squared_log: Option<f64>,
    /// Set when the log-count fit outperforms the linear one — the growth is
    /// then better described as exponential and the OLS slope understates it.
    pub nonlinearity_warning: bool,
}

fn roster(h: &Hackathon) -> BTreeSet<&str> {
    h.participant_ids.iter().map(String::as_str).collect()
}

/// Per-hackathon newcomer ratios over the whole corpus.
///
/// Hackathons are ordered by (start date, id); rosters are deduplicated.
/// Hackathons without participants are skipped and counted.
pub fn newcomer_ratios(hackathons: &[Hackathon]) -> Result<NewcomerStats> {
    let mut ordered: Vec<&Hackathon> = hackathons.iter().collect();
    ordered.sort_by(|a, b| (a.start_date, &a.id).cmp(&(b.start_date, &b.id)));

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut ratios: Vec<HackathonRatio> = Vec::new();
    let mut skipped = 0usize;
    let mut batch_start = 0usize;
    while batch_start < ordered.len() {
        let date = ordered[batch_start].start_date;
        let mut batch_end = batch_start;
        while batch_end < ordered.len() && ordered[batch_end].start_date == date {
            batch_end += 1;
        }
        // Everyone in this day batch is compared against strictly earlier
        // days only.
        for h in &ordered[batch_start..batch_end] {
            let members = roster(h);
            if members.is_empty() {
                skipped += 1;
                continue;
            }
            let newcomers = members.iter().filter(|p| !seen.contains(**p)).count();
            ratios.push(HackathonRatio {
                hackathon_id: h.id.clone(),
                start_date: h.start_date,
                participants: members.len(),
                newcomers,
                ratio: newcomers as f64 / members.len() as f64,
            });
        }
        for h in &ordered[batch_start..batch_end] {
            seen.extend(roster(h));
        }
        batch_start = batch_end;
    }

    if ratios.is_empty() {
        return Err(Error::InsufficientData(
            "no hackathon has any participants".into(),
        ));
    }

    let mut sorted: Vec<f64> = ratios.iter().map(|r| r.ratio).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_ratio = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };

    let mut histogram: Vec<RatioBin> = (0..RATIO_HISTOGRAM_BINS)
        .map(|i| RatioBin {
            lo: i as f64 / RATIO_HISTOGRAM_BINS as f64,
            hi: (i + 1) as f64 / RATIO_HISTOGRAM_BINS as f64,
            count: 0,
        })
        .collect();
    for r in &ratios {
        let idx = ((r.ratio * RATIO_HISTOGRAM_BINS as f64) as usize).min(RATIO_HISTOGRAM_BINS - 1);
        histogram[idx].count += 1;
    }

    Ok(NewcomerStats {
        ratios,
        median_ratio,
        histogram,
        skipped_without_participants: skipped,
    })
}

/// Group hackathons by roster size into logarithmic bins and average the
/// newcomer ratio within each.
pub fn ratio_vs_size(stats: &NewcomerStats, bins_per_decade: u32) -> Vec<SizeBinPoint> {
    let bins_per_decade = bins_per_decade.max(1);
    let mut bins: std::collections::BTreeMap<i64, Vec<(f64, f64)>> = std::collections::BTreeMap::new();
    for r in &stats.ratios {
        let size = r.participants as f64;
        let idx = (size.log10() * bins_per_decade as f64).floor() as i64;
        bins.entry(idx).or_default().push((size, r.ratio));
    }
    bins.into_values()
        .map(|members| {
            let n = members.len();
            let log_size_mean =
                members.iter().map(|(s, _)| s.log10()).sum::<f64>() / n as f64;
            let mean_ratio = members.iter().map(|(_, r)| r).sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var = members
                    .iter()
                    .map(|(_, r)| (r - mean_ratio).powi(2))
                    .sum::<f64>()
                    / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            SizeBinPoint {
                size: 10f64.powf(log_size_mean),
                n_hackathons: n,
                mean_ratio,
                stderr,
            }
        })
        .collect()
}

/// Weekly hackathon counts with an OLS trend and relative growth rate.
///
/// Requires at least [`MIN_GROWTH_WEEKS`] weeks between the first and last
/// start dates.
pub fn growth_rate(hackathons: &[Hackathon]) -> Result<GrowthStats> {
    if hackathons.is_empty() {
        return Err(Error::InsufficientData("no hackathons".into()));
    }
    let first = hackathons.iter().map(|h| h.start_date).min().unwrap();
    let last = hackathons.iter().map(|h| h.start_date).max().unwrap();
    let n_weeks = ((last - first).num_days() / 7 + 1) as usize;
    if n_weeks < MIN_GROWTH_WEEKS {
        return Err(Error::InsufficientData(format!(
            "corpus spans {n_weeks} weeks; the growth fit needs at least {MIN_GROWTH_WEEKS}"
        )));
    }
    let mut weekly_counts = vec![0u64; n_weeks];
    for h in hackathons {
        let idx = ((h.start_date - first).num_days() / 7) as usize;
        weekly_counts[idx] += 1;
    }

    let xs: Vec<f64> = (0..n_weeks).map(|i| i as f64).collect();
    let ys: Vec<f64> = weekly_counts.iter().map(|&c| c as f64).collect();
    let fit = stats::fit_line(&xs, &ys)?;
    let mean = ys.iter().sum::<f64>() / n_weeks as f64;

    let r_squared_log = if weekly_counts.iter().all(|&c| c > 0) {
        let log_ys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        Some(stats::fit_line(&xs, &log_ys)?.r_squared)
    } else {
        None
    };
    let nonlinearity_warning = matches!(r_squared_log, Some(r2) if r2 > fit.r_squared);

    Ok(GrowthStats {
        first_week_start: first,
        weekly_counts,
        slope: fit.slope,
        relative_weekly_rate: fit.slope / mean,
        r_squared: fit.r_squared,
        r_squared_log,
        nonlinearity_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, HashSet};

    fn hackathon(id: &str, date: (i32, u32, u32), participants: &[&str]) -> Hackathon {
        Hackathon {
            id: id.into(),
            start_date: NaiveDate::from_ymd_opt(date.0, date.1, date.2).unwrap(),
            theme_text: String::new(),
            tags: vec![],
            criteria_text: String::new(),
            project_ids: vec![],
            participant_ids: participants.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Set-difference oracle: newcomers against the union of strictly
    /// earlier rosters.
    fn brute_force_ratios(hackathons: &[Hackathon]) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for h in hackathons {
            let members: HashSet<&str> = h.participant_ids.iter().map(String::as_str).collect();
            if members.is_empty() {
                continue;
            }
            let mut earlier: HashSet<&str> = HashSet::new();
            for other in hackathons {
                if other.start_date < h.start_date {
                    earlier.extend(other.participant_ids.iter().map(String::as_str));
                }
            }
            let new = members.difference(&earlier).count();
            out.insert(h.id.clone(), new as f64 / members.len() as f64);
        }
        out
    }

    fn six_hackathon_fixture() -> Vec<Hackathon> {
        vec![
            hackathon("h1", (2016, 1, 10), &["a", "b", "c", "d"]),
            hackathon("h2", (2016, 3, 5), &["c", "d", "e"]),
            hackathon("h3", (2016, 3, 5), &["f", "a"]),
            hackathon("h4", (2016, 6, 1), &["e", "f", "g", "h"]),
            hackathon("h5", (2017, 1, 20), &["a", "i"]),
            hackathon("h6", (2017, 5, 2), &["i", "j", "k"]),
        ]
    }

    #[test]
    fn first_hackathon_is_all_newcomers() {
        let stats = newcomer_ratios(&six_hackathon_fixture()).unwrap();
        assert_eq!(stats.ratios[0].hackathon_id, "h1");
        assert_eq!(stats.ratios[0].ratio, 1.0);
    }

    #[test]
    fn ratios_match_the_set_difference_oracle() {
        let fixture = six_hackathon_fixture();
        let stats = newcomer_ratios(&fixture).unwrap();
        let expected = brute_force_ratios(&fixture);
        assert_eq!(stats.ratios.len(), expected.len());
        for r in &stats.ratios {
            assert_eq!(
                r.ratio, expected[&r.hackathon_id],
                "hackathon {}",
                r.hackathon_id
            );
        }
    }

    #[test]
    fn same_day_hackathons_do_not_see_each_other() {
        let fixture = vec![
            hackathon("early", (2016, 1, 1), &["x"]),
            hackathon("a", (2016, 3, 5), &["x", "p"]),
            hackathon("b", (2016, 3, 5), &["p", "q"]),
        ];
        let stats = newcomer_ratios(&fixture).unwrap();
        let by_id: BTreeMap<&str, f64> = stats
            .ratios
            .iter()
            .map(|r| (r.hackathon_id.as_str(), r.ratio))
            .collect();
        // "p" debuts on the shared day: new at both a and b.
        assert_eq!(by_id["a"], 0.5);
        assert_eq!(by_id["b"], 1.0);
    }

    #[test]
    fn newcomers_sum_to_distinct_participants() {
        let fixture = six_hackathon_fixture();
        let stats = newcomer_ratios(&fixture).unwrap();
        let total_new: usize = stats.ratios.iter().map(|r| r.newcomers).sum();
        let distinct: HashSet<&str> = fixture
            .iter()
            .flat_map(|h| h.participant_ids.iter().map(String::as_str))
            .collect();
        assert_eq!(total_new, distinct.len());
    }

    #[test]
    fn prefixes_keep_their_ratios() {
        let fixture = six_hackathon_fixture();
        let full = newcomer_ratios(&fixture).unwrap();
        for k in 1..=fixture.len() {
            let prefix = newcomer_ratios(&fixture[..k]).unwrap();
            for (a, b) in prefix.ratios.iter().zip(&full.ratios) {
                assert_eq!(a, b, "prefix of {k} diverged");
            }
        }
    }

    #[test]
    fn empty_rosters_are_skipped_and_counted() {
        let fixture = vec![
            hackathon("h1", (2016, 1, 1), &["a"]),
            hackathon("empty", (2016, 2, 1), &[]),
        ];
        let stats = newcomer_ratios(&fixture).unwrap();
        assert_eq!(stats.ratios.len(), 1);
        assert_eq!(stats.skipped_without_participants, 1);
        assert!(newcomer_ratios(&[hackathon("only-empty", (2016, 1, 1), &[])]).is_err());
    }

    #[test]
    fn median_and_histogram_summarize_the_ratios() {
        let stats = newcomer_ratios(&six_hackathon_fixture()).unwrap();
        let mut sorted: Vec<f64> = stats.ratios.iter().map(|r| r.ratio).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = (sorted[2] + sorted[3]) / 2.0;
        assert_eq!(stats.median_ratio, expected);
        let total: usize = stats.histogram.iter().map(|b| b.count).sum();
        assert_eq!(total, stats.ratios.len());
        assert_eq!(stats.histogram.len(), RATIO_HISTOGRAM_BINS);
        // Ratio 1.0 lands in the last bin, not a phantom 11th one.
        assert!(stats.histogram.last().unwrap().count >= 1);
    }

    #[test]
    fn uniform_sizes_collapse_to_one_bin() {
        let fixture: Vec<Hackathon> = (0..4)
            .map(|i| {
                let members: Vec<String> = (0..25).map(|p| format!("p{i}-{p}")).collect();
                let refs: Vec<&str> = members.iter().map(String::as_str).collect();
                hackathon(&format!("h{i}"), (2016, 1 + i as u32, 1), &refs)
            })
            .collect();
        let stats = newcomer_ratios(&fixture).unwrap();
        let curve = ratio_vs_size(&stats, DEFAULT_SIZE_BINS_PER_DECADE);
        assert_eq!(curve.len(), 1);
        assert_eq!(curve[0].n_hackathons, 4);
        assert!((curve[0].size - 25.0).abs() < 1e-9);
        assert_eq!(curve[0].mean_ratio, 1.0);
        assert_eq!(curve[0].stderr, 0.0);
    }

    #[test]
    fn size_binning_matches_brute_force_grouping() {
        // Sizes 2, 3, 18, 20, 150: with 5 bins/decade the indices are
        // floor(5·log10 s) = 1, 2, 6, 6, 10 → four bins.
        let sizes = [2usize, 3, 18, 20, 150];
        let fixture: Vec<Hackathon> = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let members: Vec<String> = (0..n).map(|p| format!("m{i}-{p}")).collect();
                let refs: Vec<&str> = members.iter().map(String::as_str).collect();
                hackathon(&format!("h{i}"), (2016, 1, 1 + i as u32), &refs)
            })
            .collect();
        let mut stats = newcomer_ratios(&fixture).unwrap();
        // Plant distinct ratios so the means are informative.
        for (i, r) in stats.ratios.iter_mut().enumerate() {
            r.ratio = [0.2, 0.4, 0.5, 0.9, 0.7][i];
        }
        let curve = ratio_vs_size(&stats, 5);
        assert_eq!(curve.len(), 4);
        let joint = &curve[2];
        assert_eq!(joint.n_hackathons, 2);
        assert!((joint.mean_ratio - 0.7).abs() < 1e-12);
        assert!((joint.size - (18f64 * 20f64).sqrt()).abs() < 1e-9);
        let expected_se = {
            let var = ((0.5f64 - 0.7).powi(2) + (0.9f64 - 0.7).powi(2)) / 1.0;
            (var / 2.0).sqrt()
        };
        assert!((joint.stderr - expected_se).abs() < 1e-12);
    }

    fn hackathon_on_day(id: &str, days_after_epoch: i64) -> Hackathon {
        let mut h = hackathon(id, (2018, 1, 1), &["p"]);
        h.start_date =
            NaiveDate::from_ymd_opt(2018, 1, 1).unwrap() + chrono::Duration::days(days_after_epoch);
        h
    }

    #[test]
    fn constant_weekly_counts_have_zero_growth() {
        let mut fixture = Vec::new();
        for week in 0..10i64 {
            for i in 0..10i64 {
                fixture.push(hackathon_on_day(&format!("h{week}-{i}"), week * 7 + i % 7));
            }
        }
        let growth = growth_rate(&fixture).unwrap();
        assert_eq!(growth.weekly_counts, vec![10; 10]);
        assert_eq!(growth.slope, 0.0);
        assert_eq!(growth.relative_weekly_rate, 0.0);
        assert!(!growth.nonlinearity_warning);
    }

    #[test]
    fn doubling_counts_trip_the_nonlinearity_warning() {
        let mut fixture = Vec::new();
        for week in 0..8u32 {
            for i in 0..(1u32 << week) {
                fixture.push(hackathon_on_day(&format!("h{week}-{i}"), week as i64 * 7));
            }
        }
        let growth = growth_rate(&fixture).unwrap();
        assert_eq!(
            growth.weekly_counts,
            vec![1, 2, 4, 8, 16, 32, 64, 128]
        );
        assert!(growth.nonlinearity_warning);
        let r2_log = growth.r_squared_log.unwrap();
        assert!((r2_log - 1.0).abs() < 1e-12);
        assert!(growth.r_squared < r2_log);
        assert!(growth.relative_weekly_rate > 0.0);
    }

    #[test]
    fn short_spans_are_rejected() {
        let fixture = vec![
            hackathon("h1", (2018, 1, 1), &["p"]),
            hackathon("h2", (2018, 2, 10), &["q"]),
        ];
        match growth_rate(&fixture) {
            Err(Error::InsufficientData(msg)) => assert!(msg.contains("weeks")),
            other => panic!("expected insufficient-data error, got {other:?}"),
        }
    }

    #[test]
    fn zero_weeks_suppress_the_log_comparison() {
        let mut fixture = Vec::new();
        for week in [0i64, 1, 2, 3, 5, 6, 7, 8] {
            fixture.push(hackathon_on_day(&format!("w{week}"), week * 7));
        }
        let growth = growth_rate(&fixture).unwrap();
        assert_eq!(growth.weekly_counts[4], 0);
        assert_eq!(growth.r_squared_log, None);
        assert!(!growth.nonlinearity_warning);
    }

    #[test]
    fn id_tie_break_orders_same_day_rows_deterministically() {
        let fixture = vec![
            hackathon("b", (2016, 3, 5), &["p"]),
            hackathon("a", (2016, 3, 5), &["q"]),
        ];
        let stats = newcomer_ratios(&fixture).unwrap();
        let ids: Vec<&str> = stats.ratios.iter().map(|r| r.hackathon_id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b"]);
        assert!(stats.ratios.iter().all(|r| r.ratio == 1.0));
    }
}
