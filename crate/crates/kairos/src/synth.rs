//! Synthetic ecosystems with planted ground truth.
//!
//! Every estimator in this crate gets its oracle here: event streams whose
//! post-peak decay follows a chosen exponent, participation counts drawn
//! from an exact discrete power law, productivity windows with a chosen
//! scaling exponent, rosters with a planted newcomer schedule, and themes
//! that a bundled mini-lexicon tags deterministically. Output uses the same
//! dataset layout as ingest, so synthetic corpora flow through the full
//! pipeline unchanged.

use std::collections::BTreeMap;

use chrono::{NaiveDate, TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Hackathon, Participant, Project, RepoEvent};
use crate::sdg::Lexicon;
use crate::tails::ZetaSampler;

/// First synthetic hackathon start date; successive ones step one week.
pub const BASE_DATE: NaiveDate = match NaiveDate::from_ymd_opt(2016, 1, 4) {
    Some(d) => d,
    None => panic!("valid base date"),
};

/// The peak day carries this multiple of the day-1 decay amplitude.
pub const PEAK_FACTOR: f64 = 3.0;

/// Planted (theme phrase, goal) pairs, cycled across hackathons; the
/// bundled [`synth_lexicons`] matches them one-to-one.
const PLANTED_THEMES: [(&str, u8); 3] = [
    ("quality education for everyone", 4),
    ("clean water and sanitation systems", 6),
    ("climate action through open data", 13),
];

const PLANTED_TECHNOLOGIES: [&str; 3] = ["python", "javascript", "arduino"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Daily counts are the rounded deterministic means.
    Noiseless,
    /// Daily counts are Poisson draws around the deterministic means.
    Poisson,
}

/// Roster plan for one synthetic hackathon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortPlan {
    /// Distinct participants on the roster.
    pub size: usize,
    /// How many of them have never attended before.
    pub newcomers: usize,
}

/// Full parameterization of a synthetic ecosystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_hackathons: usize,
    /// Planted relaxation exponent; valid in (0.3, 2).
    pub alpha: f64,
    /// Mean daily event count one day after the peak.
    pub amplitude: f64,
    /// Decay horizon: events are generated for days 0..=decay_days.
    pub decay_days: i64,
    /// Planted tail exponent (survival convention); valid in (1.5, 4).
    pub mu: f64,
    pub x_min: u64,
    /// Participation-count sample size.
    pub n_participation: usize,
    /// Planted productivity exponent.
    pub beta: f64,
    /// Contributor counts for scaling pairs run over 1..=scaling_c_max.
    pub scaling_c_max: u64,
    /// Scaling pairs generated per contributor count.
    pub scaling_reps: usize,
    pub noise: NoiseModel,
    /// Explicit newcomer schedule; when empty, a feasible default is used
    /// (first hackathon all new, then 60% newcomers on rosters of 10).
    pub cohorts: Vec<CohortPlan>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            n_hackathons: 50,
            alpha: 0.8,
            amplitude: 100.0,
            decay_days: 500,
            mu: 2.37,
            x_min: 4,
            n_participation: 10_000,
            beta: 4.0 / 3.0,
            scaling_c_max: 50,
            scaling_reps: 20,
            noise: NoiseModel::Poisson,
            cohorts: Vec::new(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        fn bad(name: &'static str, reason: String) -> Error {
            Error::InvalidParameter { name, reason }
        }
        if self.n_hackathons == 0 {
            return Err(bad("n_hackathons", "must be at least 1".into()));
        }
        if !(self.alpha > 0.3 && self.alpha < 2.0) {
            return Err(bad(
                "alpha",
                format!("planted decay exponent must lie in (0.3, 2), got {}", self.alpha),
            ));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(bad("amplitude", format!("must be positive, got {}", self.amplitude)));
        }
        if self.decay_days < 1 {
            return Err(bad("decay_days", format!("must be at least 1, got {}", self.decay_days)));
        }
        if !(self.mu > 1.5 && self.mu < 4.0) {
            return Err(bad(
                "mu",
                format!("planted tail exponent must lie in (1.5, 4), got {}", self.mu),
            ));
        }
        if self.x_min < 1 {
            return Err(bad("x_min", "must be at least 1".into()));
        }
        if self.n_participation == 0 {
            return Err(bad("n_participation", "must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(bad("beta", format!("must be positive, got {}", self.beta)));
        }
        if self.scaling_c_max < 2 {
            return Err(bad("scaling_c_max", "needs at least two contributor counts".into()));
        }
        if self.scaling_reps == 0 {
            return Err(bad("scaling_reps", "must be at least 1".into()));
        }
        let cohorts = self.cohort_schedule();
        if cohorts.len() != self.n_hackathons {
            return Err(bad(
                "cohorts",
                format!(
                    "schedule lists {} hackathons but n_hackathons is {}",
                    cohorts.len(),
                    self.n_hackathons
                ),
            ));
        }
        let mut pool = 0usize;
        for (k, c) in cohorts.iter().enumerate() {
            if c.size == 0 {
                return Err(bad("cohorts", format!("hackathon {k} has an empty roster")));
            }
            if c.newcomers > c.size {
                return Err(bad(
                    "cohorts",
                    format!("hackathon {k} plans {} newcomers on a roster of {}", c.newcomers, c.size),
                ));
            }
            if k == 0 && c.newcomers != c.size {
                return Err(bad(
                    "cohorts",
                    "the first hackathon must be all newcomers (nobody exists before it)".into(),
                ));
            }
            let returning = c.size - c.newcomers;
            if returning > pool {
                return Err(bad(
                    "cohorts",
                    format!(
                        "hackathon {k} wants {returning} returning participants but only {pool} exist"
                    ),
                ));
            }
            pool += c.newcomers;
        }
        Ok(())
    }

    /// The effective schedule: the explicit one, or the derived default.
    pub fn cohort_schedule(&self) -> Vec<CohortPlan> {
        if !self.cohorts.is_empty() {
            return self.cohorts.clone();
        }
        (0..self.n_hackathons)
            .map(|k| CohortPlan {
                size: 10,
                newcomers: if k == 0 { 10 } else { 6 },
            })
            .collect()
    }

    pub fn start_date(&self, k: usize) -> NaiveDate {
        BASE_DATE + chrono::Duration::weeks(k as i64)
    }
}

/// Everything a closed-loop pipeline run needs to check itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub alpha: f64,
    pub amplitude: f64,
    pub decay_days: i64,
    pub mu: f64,
    pub x_min: u64,
    pub beta: f64,
    pub noise: NoiseModel,
    /// Planted newcomer ratio per hackathon, chronological.
    pub newcomer_ratios: Vec<f64>,
    /// Planted goal per hackathon id.
    pub planted_sdgs: BTreeMap<String, u8>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
    draw as u64
}

fn hackathon_id(k: usize) -> String {
    format!("synth-h{k:04}")
}

fn repo_name(k: usize) -> String {
    format!("synth/repo-{k:04}")
}

/// Daily mean of the planted decay law at offset `t` from the start.
fn decay_mean(spec: &SynthSpec, t: i64) -> f64 {
    if t == 0 {
        PEAK_FACTOR * spec.amplitude
    } else {
        spec.amplitude * (t as f64).powf(-spec.alpha)
    }
}

/// Push-event stream realizing the planted relaxation law.
///
/// One repository per hackathon; daily counts have mean
/// `amplitude·t^(−alpha)` after a peak of `3·amplitude` on day 0, rounded
/// (noiseless) or Poisson-drawn. Hackathons are generated in parallel on
/// independent generator streams; output order is (hackathon, day).
pub fn gen_relaxation_events(spec: &SynthSpec) -> Result<Vec<RepoEvent>> {
    spec.validate()?;
    let per_hackathon: Vec<Vec<RepoEvent>> = (0..spec.n_hackathons)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(spec.seed, 1 + k as u64);
            let start = spec.start_date(k);
            let mut events = Vec::new();
            for t in 0..=spec.decay_days {
                let mean = decay_mean(spec, t);
                let count = match spec.noise {
                    NoiseModel::Noiseless => mean.round() as u64,
                    NoiseModel::Poisson => sample_poisson(&mut rng, mean),
                };
                let date = start + chrono::Duration::days(t);
                for i in 0..count {
                    let second = (i % 43_200) as u32;
                    events.push(RepoEvent {
                        event_id: format!("s{k}-{t}-{i}"),
                        event_type: "PushEvent".into(),
                        repo_name: repo_name(k),
                        actor_id: format!("dev-{k}"),
                        created_at: Utc
                            .from_utc_datetime(
                                &date.and_hms_opt(6 + second / 3600, (second / 60) % 60, second % 60)
                                    .unwrap(),
                            ),
                        public: true,
                        push_size: Some(1),
                    });
                }
            }
            events
        })
        .collect();
    Ok(per_hackathon.into_iter().flatten().collect())
}

/// Draws from the exact discrete power law `P(X > x) ~ x^(−mu)`, `x ≥ x_min`.
pub fn gen_participation_counts(spec: &SynthSpec) -> Result<Vec<u64>> {
    spec.validate()?;
    let sampler = ZetaSampler::new(spec.mu, spec.x_min)?;
    let mut rng = stream_rng(spec.seed, 1_000_003);
    Ok(sampler.sample_many(&mut rng, spec.n_participation))
}

/// (contributors, output) windows realizing the planted scaling law.
///
/// Contributor counts sweep 1..=scaling_c_max, `scaling_reps` windows each.
/// Noiseless output is `round(c^beta)`; Poisson output is `1 + Poisson(c^beta − 1)`,
/// which keeps the planted mean while never emitting an empty window.
pub fn gen_scaling_pairs(spec: &SynthSpec) -> Result<Vec<(u64, u64)>> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, 2_000_003);
    let mut pairs = Vec::with_capacity(spec.scaling_c_max as usize * spec.scaling_reps);
    for c in 1..=spec.scaling_c_max {
        let mean = (c as f64).powf(spec.beta);
        for _ in 0..spec.scaling_reps {
            let r = match spec.noise {
                NoiseModel::Noiseless => mean.round().max(1.0) as u64,
                NoiseModel::Poisson => 1 + sample_poisson(&mut rng, mean - 1.0),
            };
            pairs.push((c, r));
        }
    }
    Ok(pairs)
}

/// Rosters realizing the planted newcomer schedule.
///
/// Returning participants are drawn without replacement from everyone seen
/// so far. Returns parallel vectors: roster per hackathon, and the planted
/// ratio (newcomers / size).
fn gen_rosters(spec: &SynthSpec) -> (Vec<Vec<String>>, Vec<f64>) {
    let cohorts = spec.cohort_schedule();
    let mut pool: Vec<String> = Vec::new();
    let mut rosters = Vec::with_capacity(cohorts.len());
    let mut ratios = Vec::with_capacity(cohorts.len());
    let mut next_id = 0usize;
    for (k, plan) in cohorts.iter().enumerate() {
        let mut rng = stream_rng(spec.seed, 3_000_017 + k as u64);
        let returning = plan.size - plan.newcomers;
        let mut roster: Vec<String> = rand::seq::index::sample(&mut rng, pool.len(), returning)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect();
        for _ in 0..plan.newcomers {
            let id = format!("u{next_id:06}");
            next_id += 1;
            pool.push(id.clone());
            roster.push(id);
        }
        ratios.push(plan.newcomers as f64 / plan.size as f64);
        rosters.push(roster);
    }
    (rosters, ratios)
}

/// The bundled mini-lexicon matching the planted theme phrases.
pub fn synth_lexicons() -> Vec<Lexicon> {
    let mut entries: BTreeMap<u8, Vec<String>> = BTreeMap::new();
    entries.insert(4, vec!["quality education".into()]);
    entries.insert(6, vec!["clean water".into()]);
    entries.insert(13, vec!["climate action".into()]);
    vec![Lexicon {
        name: "synth-core".into(),
        entries,
    }]
}

/// Generate the full synthetic corpus plus its ground truth.
///
/// The dataset is ready for [`crate::ingest::write_dataset`] and survives
/// quality control untouched (weekly 2016+ start dates, consistent
/// references, every hackathon populated).
pub fn gen_dataset(spec: &SynthSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let events = gen_relaxation_events(spec)?;
    let (rosters, newcomer_ratios) = gen_rosters(spec);

    let mut hackathons = Vec::with_capacity(spec.n_hackathons);
    let mut projects = Vec::with_capacity(spec.n_hackathons);
    let mut planted_sdgs = BTreeMap::new();
    let mut attendance: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for k in 0..spec.n_hackathons {
        let id = hackathon_id(k);
        let (theme, sdg) = PLANTED_THEMES[k % PLANTED_THEMES.len()];
        planted_sdgs.insert(id.clone(), sdg);
        let project_id = format!("synth-p{k:04}");
        hackathons.push(Hackathon {
            id: id.clone(),
            start_date: spec.start_date(k),
            theme_text: format!("Hackathon {k}: {theme}"),
            tags: vec![],
            criteria_text: String::new(),
            project_ids: vec![project_id.clone()],
            participant_ids: rosters[k].clone(),
        });
        projects.push(Project {
            id: project_id,
            hackathon_id: Some(id.clone()),
            repo_url: Some(format!("https://github.com/{}", repo_name(k))),
            technologies: vec![PLANTED_TECHNOLOGIES[k % PLANTED_TECHNOLOGIES.len()].into()],
            member_ids: rosters[k].clone(),
        });
        for participant in &rosters[k] {
            attendance.entry(participant.clone()).or_default().push(id.clone());
        }
    }
    let participants: Vec<Participant> = attendance
        .into_iter()
        .map(|(id, hackathon_ids)| Participant { id, hackathon_ids })
        .collect();

    let dataset = Dataset {
        hackathons,
        projects,
        participants,
        events,
    };
    let truth = GroundTruth {
        seed: spec.seed,
        alpha: spec.alpha,
        amplitude: spec.amplitude,
        decay_days: spec.decay_days,
        mu: spec.mu,
        x_min: spec.x_min,
        beta: spec.beta,
        noise: spec.noise,
        newcomer_ratios,
        planted_sdgs,
    };
    Ok((dataset, truth))
}
