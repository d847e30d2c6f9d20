//! SDG × technology enrichment: how often each technology shows up at
//! hackathons aligned with each goal, plus agglomerative clustering
//! (Euclidean distance, complete linkage) to order the heatmap axes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Hackathon, Project};
use crate::sdg::{SdgTagSet, N_SDGS};

/// Technologies must appear at this fraction of all hackathons to get a row.
pub const DEFAULT_MIN_PREVALENCE: f64 = 0.001;

/// Percent-usage matrix: rows are technologies, columns the 17 goals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnrichmentMatrix {
    /// Row labels, lexicographically sorted.
    pub technologies: Vec<String>,
    /// `cells[row][s]` = percentage of SDG-(s+1)–aligned hackathons with at
    /// least one project using the row's technology.
    pub cells: Vec<[f64; N_SDGS]>,
    /// Aligned-hackathon count per goal (the cell denominators).
    pub sdg_hackathon_counts: [u64; N_SDGS],
    /// Total hackathons the prevalence filter was measured against.
    pub n_hackathons: usize,
}

impl EnrichmentMatrix {
    /// Cell lookup by technology label; None for unknown labels or goals.
    pub fn cell(&self, technology: &str, sdg: u8) -> Option<f64> {
        let row = self
            .technologies
            .binary_search_by(|t| t.as_str().cmp(technology))
            .ok()?;
        if sdg == 0 || sdg as usize > N_SDGS {
            return None;
        }
        Some(self.cells[row][sdg as usize - 1])
    }
}

/// Which axis of the matrix to cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Rows,
    Cols,
}

/// One agglomeration step. Node ids: `0..n` are leaves (in label order),
/// `n + k` is the cluster created by `merges[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    /// Leaves under the new cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    /// Leaf labels in their input (id) order.
    pub labels: Vec<String>,
    /// `labels.len() − 1` merges with non-decreasing heights.
    pub merges: Vec<Merge>,
    /// Labels in dendrogram display order.
    pub leaf_order: Vec<String>,
}

/// Lowercased, trimmed technology tags per hackathon.
fn technologies_by_hackathon(projects: &[Project]) -> BTreeMap<&str, BTreeSet<String>> {
    let mut map: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for p in projects {
        let Some(hid) = p.hackathon_id.as_deref() else {
            continue;
        };
        let techs = map.entry(hid).or_default();
        for t in &p.technologies {
            let t = t.trim().to_lowercase();
            if !t.is_empty() {
                techs.insert(t);
            }
        }
    }
    map
}

/// Build the usage-percentage matrix from tagged hackathons.
///
/// A technology counts once per hackathon no matter how many of its projects
/// use it; the cell denominator is the number of hackathons aligned with the
/// column's goal. Technologies present at fewer than `min_prevalence` of all
/// hackathons are dropped.
pub fn build_matrix(
    hackathons: &[Hackathon],
    projects: &[Project],
    tags: &[SdgTagSet],
    min_prevalence: f64,
) -> Result<EnrichmentMatrix> {
    if !(0.0..=1.0).contains(&min_prevalence) {
        return Err(Error::InvalidParameter {
            name: "min_prevalence",
            reason: format!("must be a fraction in [0, 1], got {min_prevalence}"),
        });
    }
    if hackathons.is_empty() {
        return Err(Error::InsufficientData("no hackathons".into()));
    }
    let aligned: BTreeMap<&str, &[bool; N_SDGS]> = tags
        .iter()
        .map(|t| (t.hackathon_id.as_str(), &t.aligned))
        .collect();
    let techs = technologies_by_hackathon(projects);

    let mut sdg_hackathon_counts = [0u64; N_SDGS];
    for h in hackathons {
        if let Some(flags) = aligned.get(h.id.as_str()) {
            for (s, &on) in flags.iter().enumerate() {
                if on {
                    sdg_hackathon_counts[s] += 1;
                }
            }
        }
    }
    if sdg_hackathon_counts.iter().all(|&c| c == 0) {
        return Err(Error::InsufficientData(
            "no hackathon is aligned with any goal; nothing to enrich".into(),
        ));
    }

    // (technology) -> (per-goal aligned-hackathon hits, overall presence).
    let mut hits: BTreeMap<&str, ([u64; N_SDGS], u64)> = BTreeMap::new();
    for h in hackathons {
        let Some(used) = techs.get(h.id.as_str()) else {
            continue;
        };
        let flags = aligned.get(h.id.as_str());
        for t in used {
            let entry = hits.entry(t.as_str()).or_insert(([0; N_SDGS], 0));
            entry.1 += 1;
            if let Some(flags) = flags {
                for (s, &on) in flags.iter().enumerate() {
                    if on {
                        entry.0[s] += 1;
                    }
                }
            }
        }
    }

    let n_hackathons = hackathons.len();
    let mut technologies = Vec::new();
    let mut cells = Vec::new();
    for (tech, (per_sdg, presence)) in &hits {
        if (*presence as f64) / (n_hackathons as f64) < min_prevalence {
            continue;
        }
        let mut row = [0.0; N_SDGS];
        for s in 0..N_SDGS {
            if sdg_hackathon_counts[s] > 0 {
                row[s] = 100.0 * per_sdg[s] as f64 / sdg_hackathon_counts[s] as f64;
            }
        }
        technologies.push(tech.to_string());
        cells.push(row);
    }

    Ok(EnrichmentMatrix {
        technologies,
        cells,
        sdg_hackathon_counts,
        n_hackathons,
    })
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Standardize one vector to zero mean, unit variance (all zeros when flat).
fn zscore(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if var == 0.0 {
        return vec![0.0; v.len()];
    }
    let sd = var.sqrt();
    v.iter().map(|x| (x - mean) / sd).collect()
}

/// Agglomerative complete-linkage clustering over labeled vectors.
///
/// Distance ties break on the lexicographically smallest pair of cluster
/// labels (a cluster is labeled by its smallest leaf), so the tree does not
/// depend on input order. At every merge the display order puts the cluster
/// with the smaller label first. One item yields a leaf-only tree.
pub fn cluster_items(labels: &[String], vectors: &[Vec<f64>]) -> Result<Dendrogram> {
    if labels.len() != vectors.len() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} vectors",
            labels.len(),
            vectors.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::InsufficientData("nothing to cluster".into()));
    }
    {
        let unique: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        if unique.len() != labels.len() {
            return Err(Error::InvalidInput("duplicate cluster labels".into()));
        }
    }
    let n = labels.len();
    if n == 1 {
        return Ok(Dendrogram {
            labels: labels.to_vec(),
            merges: vec![],
            leaf_order: labels.to_vec(),
        });
    }

    // One slot per leaf; a merge collapses slot j into slot i (i < j), so
    // slot indices — and the distance matrix — stay stable throughout.
    struct Slot {
        node: usize,
        min_label: usize, // leaf index of the cluster's smallest label
        order: Vec<usize>,
    }
    let mut slots: Vec<Option<Slot>> = (0..n)
        .map(|i| {
            Some(Slot {
                node: i,
                min_label: i,
                order: vec![i],
            })
        })
        .collect();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| euclidean(&vectors[i], &vectors[j])).collect())
        .collect();

    let label_pair = |slots: &[Option<Slot>], i: usize, j: usize| -> (String, String) {
        let a = labels[slots[i].as_ref().unwrap().min_label].clone();
        let b = labels[slots[j].as_ref().unwrap().min_label].clone();
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    };

    let mut merges: Vec<Merge> = Vec::with_capacity(n - 1);
    let mut last_height = f64::NEG_INFINITY;
    for step in 0..n - 1 {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..n {
            if slots[i].is_none() {
                continue;
            }
            for j in i + 1..n {
                if slots[j].is_none() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        let (d, bd) = (dist[i][j], dist[bi][bj]);
                        if d != bd {
                            d < bd
                        } else {
                            label_pair(&slots, i, j) < label_pair(&slots, bi, bj)
                        }
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.expect("at least two live clusters remain");
        let height = dist[i][j];
        assert!(
            height >= last_height,
            "complete-linkage heights must be non-decreasing ({height} after {last_height})"
        );
        last_height = height;

        let b = slots[j].take().unwrap();
        let a = slots[i].take().unwrap();
        let (first, second) = if labels[a.min_label] <= labels[b.min_label] {
            (&a.order, &b.order)
        } else {
            (&b.order, &a.order)
        };
        let mut order = first.clone();
        order.extend(second.iter().copied());
        merges.push(Merge {
            a: a.node,
            b: b.node,
            height,
            size: order.len(),
        });
        let min_label = if labels[a.min_label] <= labels[b.min_label] {
            a.min_label
        } else {
            b.min_label
        };
        slots[i] = Some(Slot {
            node: n + step,
            min_label,
            order,
        });
        for k in 0..n {
            if k != i && slots[k].is_some() {
                let d = dist[k][j].max(dist[k][i]);
                dist[k][i] = d;
                dist[i][k] = d;
            }
        }
    }

    let root = slots.into_iter().flatten().next().unwrap();
    let leaf_order = root.order.iter().map(|&i| labels[i].clone()).collect();
    Ok(Dendrogram {
        labels: labels.to_vec(),
        merges,
        leaf_order,
    })
}

/// Cluster one axis of the matrix. Column labels are `sdg1`..`sdg17`; with
/// `standardize` set, each item vector is z-scored before distances.
pub fn cluster(matrix: &EnrichmentMatrix, axis: Axis, standardize: bool) -> Result<Dendrogram> {
    let (labels, mut vectors): (Vec<String>, Vec<Vec<f64>>) = match axis {
        Axis::Rows => (
            matrix.technologies.clone(),
            matrix.cells.iter().map(|row| row.to_vec()).collect(),
        ),
        Axis::Cols => (
            (1..=N_SDGS).map(|s| format!("sdg{s}")).collect(),
            (0..N_SDGS)
                .map(|s| matrix.cells.iter().map(|row| row[s]).collect())
                .collect(),
        ),
    };
    if standardize {
        vectors = vectors.iter().map(|v| zscore(v)).collect();
    }
    cluster_items(&labels, &vectors)
}
