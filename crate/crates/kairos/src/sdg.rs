//! Goal tagging: match hackathon texts against keyword lexicons for the 17
//! Sustainable Development Goals, apply a bias-correction weight vector,
//! and derive yearly coverage series with a linear trend fit.
//!
//! Matching is whole-token phrase matching: texts and patterns are
//! lowercased, punctuation becomes whitespace, and a pattern hits when its
//! token sequence appears contiguously. Within one dictionary a pattern
//! contributes at most once per hackathon and goal; the same pattern in a
//! second dictionary contributes again (dictionary-level dedup, matching
//! the upstream word-counting behaviour).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Hackathon;
use crate::stats;

pub const N_SDGS: usize = 17;

/// One keyword dictionary: goal index (1..=17) → match patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    pub entries: BTreeMap<u8, Vec<String>>,
}

/// Per-goal multiplicative bias-correction weights (all strictly positive).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionVector(pub [f64; N_SDGS]);

impl Default for CorrectionVector {
    fn default() -> Self {
        Self([1.0; N_SDGS])
    }
}

impl CorrectionVector {
    pub fn new(weights: [f64; N_SDGS]) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(w > &0.0)) {
            return Err(Error::InvalidParameter {
                name: "correction_vector",
                reason: format!("weight for goal {} must be positive, got {}", i + 1, weights[i]),
            });
        }
        Ok(Self(weights))
    }

    pub fn weight(&self, sdg: u8) -> f64 {
        self.0[(sdg - 1) as usize]
    }

    /// Load from CSV (`sdg,weight`) or JSON (array of 17 weights). Goals
    /// absent from a CSV keep the neutral weight 1.
    pub fn load(path: &Path) -> Result<Self> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let weights: Vec<f64> = serde_json::from_str(&text).map_err(|e| Error::Json {
                path: path.to_path_buf(),
                source: e,
            })?;
            let arr: [f64; N_SDGS] = weights.try_into().map_err(|v: Vec<f64>| {
                Error::InvalidInput(format!("correction vector needs 17 weights, got {}", v.len()))
            })?;
            return Self::new(arr);
        }
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut weights = [1.0f64; N_SDGS];
        for record in reader.records() {
            let record = record.map_err(|e| Error::csv(path, e))?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let sdg = parse_sdg_index(record.get(0).unwrap_or_default())
                .map_err(|m| record_err(path, line, m))?;
            let weight: f64 = record
                .get(1)
                .unwrap_or_default()
                .parse()
                .map_err(|e| record_err(path, line, format!("bad weight: {e}")))?;
            weights[(sdg - 1) as usize] = weight;
        }
        Self::new(weights)
    }
}

/// The tagging result for one hackathon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdgTagSet {
    pub hackathon_id: String,
    /// Distinct (dictionary, pattern) hits per goal.
    pub raw: [u64; N_SDGS],
    /// raw × correction weight.
    pub corrected: [f64; N_SDGS],
    /// corrected score strictly above the alignment threshold.
    pub aligned: [bool; N_SDGS],
    /// Every contributing (goal, dictionary, pattern), sorted.
    pub matches: Vec<PatternMatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PatternMatch {
    pub sdg: u8,
    pub dictionary: String,
    pub pattern: String,
}

impl SdgTagSet {
    pub fn is_sdg_related(&self) -> bool {
        self.aligned.iter().any(|&a| a)
    }

    pub fn aligned_sdgs(&self) -> Vec<u8> {
        (1..=N_SDGS as u8).filter(|&s| self.aligned[(s - 1) as usize]).collect()
    }
}

fn record_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Record {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_sdg_index(cell: &str) -> std::result::Result<u8, String> {
    let cell = cell.trim();
    let digits = cell.strip_prefix("sdg").or_else(|| cell.strip_prefix("SDG")).unwrap_or(cell);
    match digits.trim().parse::<u8>() {
        Ok(n) if (1..=N_SDGS as u8).contains(&n) => Ok(n),
        _ => Err(format!("goal index must be 1..=17, got {cell:?}")),
    }
}

/// Load lexicons from CSV with columns `dictionary, sdg, pattern`.
/// Dictionaries come back sorted by name; patterns are normalized and
/// deduplicated within each (dictionary, goal).
pub fn load_lexicons(path: &Path) -> Result<Vec<Lexicon>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| record_err(path, 1, format!("missing column {name:?}")))
    };
    let (c_dict, c_sdg, c_pat) = (col("dictionary")?, col("sdg")?, col("pattern")?);

    let mut by_name: BTreeMap<String, BTreeMap<u8, BTreeSet<String>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let dict = record.get(c_dict).unwrap_or_default().trim();
        if dict.is_empty() {
            return Err(record_err(path, line, "empty dictionary name"));
        }
        let sdg = parse_sdg_index(record.get(c_sdg).unwrap_or_default())
            .map_err(|m| record_err(path, line, m))?;
        let pattern = normalize_pattern(record.get(c_pat).unwrap_or_default());
        if pattern.is_empty() {
            return Err(record_err(path, line, "empty pattern"));
        }
        by_name
            .entry(dict.to_string())
            .or_default()
            .entry(sdg)
            .or_default()
            .insert(pattern);
    }

    Ok(by_name
        .into_iter()
        .map(|(name, goals)| Lexicon {
            name,
            entries: goals
                .into_iter()
                .map(|(sdg, pats)| (sdg, pats.into_iter().collect()))
                .collect(),
        })
        .collect())
}

/// Lowercase and split on anything that is not alphanumeric.
fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// A pattern in canonical form: its tokens joined by single spaces.
fn normalize_pattern(pattern: &str) -> String {
    tokenize(pattern).join(" ")
}

fn contains_phrase(tokens: &[String], phrase: &[&str]) -> bool {
    if phrase.is_empty() || phrase.len() > tokens.len() {
        return false;
    }
    tokens
        .windows(phrase.len())
        .any(|w| w.iter().zip(phrase).all(|(t, p)| t == p))
}

/// Tag one hackathon against every lexicon.
///
/// The searched text is the concatenation of `theme_text`, the tags, and
/// `criteria_text`. Alignment holds for a goal when its corrected score is
/// strictly above `threshold` (0 by default).
pub fn tag_hackathon(
    hackathon: &Hackathon,
    lexicons: &[Lexicon],
    correction: &CorrectionVector,
    threshold: f64,
) -> Result<SdgTagSet> {
    if lexicons.is_empty() {
        return Err(Error::InvalidInput(
            "no lexicons loaded: nothing to match against".into(),
        ));
    }
    let mut text = String::new();
    text.push_str(&hackathon.theme_text);
    for tag in &hackathon.tags {
        text.push(' ');
        text.push_str(tag);
    }
    text.push(' ');
    text.push_str(&hackathon.criteria_text);
    let tokens = tokenize(&text);

    let mut matches: BTreeSet<PatternMatch> = BTreeSet::new();
    for lexicon in lexicons {
        for (&sdg, patterns) in &lexicon.entries {
            for pattern in patterns {
                let phrase: Vec<&str> = pattern.split(' ').collect();
                if contains_phrase(&tokens, &phrase) {
                    matches.insert(PatternMatch {
                        sdg,
                        dictionary: lexicon.name.clone(),
                        pattern: pattern.clone(),
                    });
                }
            }
        }
    }

    let mut raw = [0u64; N_SDGS];
    for m in &matches {
        raw[(m.sdg - 1) as usize] += 1;
    }
    let mut corrected = [0.0f64; N_SDGS];
    let mut aligned = [false; N_SDGS];
    for i in 0..N_SDGS {
        corrected[i] = raw[i] as f64 * correction.0[i];
        aligned[i] = corrected[i] > threshold;
    }

    Ok(SdgTagSet {
        hackathon_id: hackathon.id.clone(),
        raw,
        corrected,
        aligned,
        matches: matches.into_iter().collect(),
    })
}

/// Tag a whole corpus in parallel, preserving input order.
pub fn tag_all(
    hackathons: &[Hackathon],
    lexicons: &[Lexicon],
    correction: &CorrectionVector,
    threshold: f64,
) -> Result<Vec<SdgTagSet>> {
    hackathons
        .par_iter()
        .map(|h| tag_hackathon(h, lexicons, correction, threshold))
        .collect()
}

/// One calendar year of coverage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearCoverage {
    pub year: i32,
    pub hackathons: usize,
    /// Hackathons aligned with at least one goal.
    pub sdg_related: usize,
    /// 100 × sdg_related / hackathons.
    pub percentage: f64,
    /// Share of that year's goal alignments per goal; sums to 1 whenever
    /// any alignment exists (multi-label: one hackathon can feed several).
    pub shares: [f64; N_SDGS],
}

/// Yearly coverage of goal-related hackathons, ascending by year.
/// Hackathons missing from `tagsets` count as unrelated.
pub fn coverage_by_year(hackathons: &[Hackathon], tagsets: &[SdgTagSet]) -> Vec<YearCoverage> {
    use chrono::Datelike;
    let tags_by_id: HashMap<&str, &SdgTagSet> =
        tagsets.iter().map(|t| (t.hackathon_id.as_str(), t)).collect();

    let mut years: BTreeMap<i32, (usize, usize, [u64; N_SDGS])> = BTreeMap::new();
    for h in hackathons {
        let entry = years.entry(h.start_date.year()).or_default();
        entry.0 += 1;
        if let Some(tags) = tags_by_id.get(h.id.as_str()) {
            if tags.is_sdg_related() {
                entry.1 += 1;
            }
            for (i, &a) in tags.aligned.iter().enumerate() {
                if a {
                    entry.2[i] += 1;
                }
            }
        }
    }

    years
        .into_iter()
        .map(|(year, (total, related, counts))| {
            let mentions: u64 = counts.iter().sum();
            let mut shares = [0.0f64; N_SDGS];
            if mentions > 0 {
                for i in 0..N_SDGS {
                    shares[i] = counts[i] as f64 / mentions as f64;
                }
            }
            YearCoverage {
                year,
                hackathons: total,
                sdg_related: related,
                percentage: 100.0 * related as f64 / total as f64,
                shares,
            }
        })
        .collect()
}

/// Linear trend of the yearly percentages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub p_value: f64,
    /// Set when the series carries no variance at all.
    pub degenerate: bool,
}

/// Ordinary least squares of percentage on year. Needs at least 3 points.
pub fn fit_trend(points: &[(i32, f64)]) -> Result<TrendFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "trend fit needs at least 3 yearly points, got {}",
            points.len()
        )));
    }
    let x: Vec<f64> = points.iter().map(|&(y, _)| y as f64).collect();
    let y: Vec<f64> = points.iter().map(|&(_, p)| p).collect();
    let fit = stats::fit_line(&x, &y)?;
    Ok(TrendFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        p_value: fit.p_value,
        degenerate: fit.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn hackathon(id: &str, year: i32, theme: &str) -> Hackathon {
        Hackathon {
            id: id.into(),
            start_date: NaiveDate::from_ymd_opt(year, 5, 1).unwrap(),
            theme_text: theme.into(),
            tags: vec![],
            criteria_text: String::new(),
            project_ids: vec![],
            participant_ids: vec![],
        }
    }

    fn lexicon(name: &str, entries: &[(u8, &[&str])]) -> Lexicon {
        Lexicon {
            name: name.into(),
            entries: entries
                .iter()
                .map(|&(sdg, pats)| (sdg, pats.iter().map(|p| normalize_pattern(p)).collect()))
                .collect(),
        }
    }

    #[test]
    fn phrase_match_tags_the_goal() {
        let h = hackathon("h1", 2020, "quality education for refugees");
        let lex = [lexicon("edu", &[(4, &["quality education"])])];
        let tags = tag_hackathon(&h, &lex, &CorrectionVector::default(), 0.0).unwrap();
        assert!(tags.aligned[3]);
        assert_eq!(tags.raw[3], 1);
        assert_eq!(tags.aligned_sdgs(), vec![4]);
    }

    #[test]
    fn empty_texts_match_nothing() {
        let h = hackathon("h1", 2020, "");
        let lex = [lexicon("edu", &[(4, &["education"])])];
        let tags = tag_hackathon(&h, &lex, &CorrectionVector::default(), 0.0).unwrap();
        assert_eq!(tags.raw, [0; N_SDGS]);
        assert!(!tags.is_sdg_related());
        assert!(tags.matches.is_empty());
    }

    #[test]
    fn no_lexicons_is_an_error() {
        let h = hackathon("h1", 2020, "anything");
        assert!(tag_hackathon(&h, &[], &CorrectionVector::default(), 0.0).is_err());
    }

    #[test]
    fn dedup_is_per_dictionary() {
        let h = hackathon("h1", 2020, "clean water and clean water again");
        // Same pattern in two dictionaries → two contributions.
        let two_dicts = [
            lexicon("a", &[(6, &["clean water"])]),
            lexicon("b", &[(6, &["clean water"])]),
        ];
        let tags = tag_hackathon(&h, &two_dicts, &CorrectionVector::default(), 0.0).unwrap();
        assert_eq!(tags.raw[5], 2);

        // Appearing twice in the text, one dictionary → one contribution.
        let one_dict = [lexicon("a", &[(6, &["clean water"])])];
        let tags = tag_hackathon(&h, &one_dict, &CorrectionVector::default(), 0.0).unwrap();
        assert_eq!(tags.raw[5], 1);
    }

    #[test]
    fn matching_survives_punctuation_and_case() {
        let h = hackathon("h1", 2020, "Quality-Education! matters");
        let lex = [lexicon("edu", &[(4, &["quality education"])])];
        let tags = tag_hackathon(&h, &lex, &CorrectionVector::default(), 0.0).unwrap();
        assert_eq!(tags.raw[3], 1);
    }

    #[test]
    fn token_boundaries_are_respected() {
        // "education" must not match inside "reeducation".
        let h = hackathon("h1", 2020, "reeducation campaign");
        let lex = [lexicon("edu", &[(4, &["education"])])];
        let tags = tag_hackathon(&h, &lex, &CorrectionVector::default(), 0.0).unwrap();
        assert_eq!(tags.raw[3], 0);
    }

    #[test]
    fn tags_and_criteria_are_searched_too() {
        let mut h = hackathon("h1", 2020, "");
        h.tags = vec!["renewable energy".into()];
        h.criteria_text = "judged on affordable housing impact".into();
        let lex = [lexicon(
            "mix",
            &[(7, &["renewable energy"]), (11, &["affordable housing"])],
        )];
        let tags = tag_hackathon(&h, &lex, &CorrectionVector::default(), 0.0).unwrap();
        assert!(tags.aligned[6] && tags.aligned[10]);
    }

    #[test]
    fn correction_scaling_keeps_alignments() {
        let h = hackathon("h1", 2020, "zero hunger and clean water");
        let lex = [lexicon("a", &[(2, &["zero hunger"]), (6, &["clean water"])])];
        let base = tag_hackathon(&h, &lex, &CorrectionVector::default(), 0.0).unwrap();
        let scaled_cv = CorrectionVector::new([10.0; N_SDGS]).unwrap();
        let scaled = tag_hackathon(&h, &lex, &scaled_cv, 0.0).unwrap();
        assert_eq!(base.aligned, scaled.aligned);
        assert_eq!(base.raw, scaled.raw);
    }

    #[test]
    fn threshold_gates_alignment_on_corrected_score() {
        let h = hackathon("h1", 2020, "zero hunger");
        let lex = [lexicon("a", &[(2, &["zero hunger"])])];
        let mut weights = [1.0; N_SDGS];
        weights[1] = 0.3;
        let cv = CorrectionVector::new(weights).unwrap();
        let tags = tag_hackathon(&h, &lex, &cv, 0.5).unwrap();
        assert_eq!(tags.raw[1], 1);
        assert!((tags.corrected[1] - 0.3).abs() < 1e-12);
        assert!(!tags.aligned[1]);
    }

    #[test]
    fn lexicon_order_does_not_matter() {
        let h = hackathon("h1", 2020, "life below water and life on land");
        let a = lexicon("a", &[(14, &["life below water"])]);
        let b = lexicon("b", &[(15, &["life on land"])]);
        let forward = tag_hackathon(&h, &[a.clone(), b.clone()], &CorrectionVector::default(), 0.0)
            .unwrap();
        let backward =
            tag_hackathon(&h, &[b, a], &CorrectionVector::default(), 0.0).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn removing_a_dictionary_never_raises_counts() {
        let h = hackathon("h1", 2020, "clean water for quality education");
        let lexicons = [
            lexicon("a", &[(6, &["clean water"])]),
            lexicon("b", &[(4, &["quality education"]), (6, &["water"])]),
        ];
        let full = tag_hackathon(&h, &lexicons, &CorrectionVector::default(), 0.0).unwrap();
        let partial =
            tag_hackathon(&h, &lexicons[..1], &CorrectionVector::default(), 0.0).unwrap();
        for i in 0..N_SDGS {
            assert!(partial.raw[i] <= full.raw[i]);
        }
    }

    #[test]
    fn single_aligned_hackathon_dominates_coverage() {
        let h = hackathon("h1", 2020, "no poverty");
        let lex = [lexicon("a", &[(1, &["no poverty"])])];
        let tags = tag_all(&[h.clone()], &lex, &CorrectionVector::default(), 0.0).unwrap();
        let cov = coverage_by_year(&[h], &tags);
        assert_eq!(cov.len(), 1);
        assert_eq!(cov[0].percentage, 100.0);
        assert_eq!(cov[0].shares[0], 1.0);
    }

    #[test]
    fn coverage_equals_brute_force_on_planted_fixture() {
        // 50 hackathons; every third gets goal 3, every fifth goal 5.
        let lex = [lexicon("a", &[(3, &["good health"]), (5, &["gender equality"])])];
        let hackathons: Vec<Hackathon> = (0..50)
            .map(|i| {
                let mut theme = String::from("hack day");
                if i % 3 == 0 {
                    theme.push_str(" good health");
                }
                if i % 5 == 0 {
                    theme.push_str(" gender equality");
                }
                hackathon(&format!("h{i:02}"), 2015 + (i % 4) as i32, &theme)
            })
            .collect();
        let tags = tag_all(&hackathons, &lex, &CorrectionVector::default(), 0.0).unwrap();
        let coverage = coverage_by_year(&hackathons, &tags);

        use chrono::Datelike;
        for yc in &coverage {
            let in_year: Vec<usize> = (0..50)
                .filter(|&i| hackathons[i].start_date.year() == yc.year)
                .collect();
            let related = in_year.iter().filter(|&&i| i % 3 == 0 || i % 5 == 0).count();
            let m3 = in_year.iter().filter(|&&i| i % 3 == 0).count() as f64;
            let m5 = in_year.iter().filter(|&&i| i % 5 == 0).count() as f64;
            assert_eq!(yc.hackathons, in_year.len());
            assert_eq!(yc.sdg_related, related);
            assert_eq!(yc.percentage, 100.0 * related as f64 / in_year.len() as f64);
            assert_eq!(yc.shares[2], m3 / (m3 + m5));
            assert_eq!(yc.shares[4], m5 / (m3 + m5));
            let total: f64 = yc.shares.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trend_fit_examples() {
        let flat: Vec<(i32, f64)> = (2015..2018).map(|y| (y, 10.0)).collect();
        let fit = fit_trend(&flat).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 0.0);
        assert!(fit.degenerate);

        let exact: Vec<(i32, f64)> = (0..6).map(|i| (2010 + i, 2.0 * i as f64 + 1.0)).collect();
        let fit = fit_trend(&exact).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.p_value < 0.001);

        assert!(fit_trend(&[(2015, 1.0), (2016, 2.0)]).is_err());
    }

    #[test]
    fn lexicon_csv_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lexicon.csv");
        std::fs::write(
            &path,
            "dictionary,sdg,pattern\n\
             base,4,Quality Education\n\
             base,4,quality education\n\
             base,6,clean water\n\
             aux,SDG6,water sanitation\n",
        )
        .unwrap();
        let lexicons = load_lexicons(&path).unwrap();
        assert_eq!(lexicons.len(), 2);
        assert_eq!(lexicons[0].name, "aux");
        assert_eq!(lexicons[1].entries[&4], vec!["quality education"]); // deduped
        assert_eq!(lexicons[0].entries[&6], vec!["water sanitation"]);

        std::fs::write(&path, "dictionary,sdg,pattern\nbase,18,too far\n").unwrap();
        assert!(load_lexicons(&path).is_err());
        std::fs::write(&path, "dictionary,sdg,pattern\nbase,4,\n").unwrap();
        assert!(load_lexicons(&path).is_err());
    }

    #[test]
    fn correction_vector_loading_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cv.csv");
        std::fs::write(&path, "sdg,weight\n4,2.5\n9,0.5\n").unwrap();
        let cv = CorrectionVector::load(&path).unwrap();
        assert_eq!(cv.weight(4), 2.5);
        assert_eq!(cv.weight(9), 0.5);
        assert_eq!(cv.weight(1), 1.0);

        std::fs::write(&path, "sdg,weight\n4,-1\n").unwrap();
        assert!(CorrectionVector::load(&path).is_err());

        let json = dir.path().join("cv.json");
        std::fs::write(&json, serde_json::to_string(&vec![1.0; 17]).unwrap()).unwrap();
        assert_eq!(CorrectionVector::load(&json).unwrap(), CorrectionVector::default());
        std::fs::write(&json, serde_json::to_string(&vec![1.0; 5]).unwrap()).unwrap();
        assert!(CorrectionVector::load(&json).is_err());
    }
}
