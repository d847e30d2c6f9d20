//! `kairos report`: collect whatever artifacts earlier stages produced
//! into one human-readable Markdown summary.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Serialize;
use serde_json::Value;

use crate::artifacts::{self, Manifest};
use crate::config::RunConfig;

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ReportArgs {}

/// Load a JSON artifact if it exists, recording it as an input.
fn load(out_dir: &Path, name: &str, manifest: &mut Manifest) -> Result<Option<Value>> {
    let path = out_dir.join(name);
    if !path.is_file() {
        return Ok(None);
    }
    manifest.record_input(&path)?;
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let value = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse {}", path.display()))?;
    Ok(Some(value))
}

fn num(v: &Value) -> String {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(kairos::emit::fmt_sig9)
            .unwrap_or_else(|| n.to_string()),
        Value::Null => "n/a".into(),
        other => other.to_string().trim_matches('"').to_string(),
    }
}

fn field(v: &Value, key: &str) -> String {
    num(v.get(key).unwrap_or(&Value::Null))
}

pub fn run(
    _cfg: &RunConfig,
    _args: &ReportArgs,
    out_dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let mut md = String::from("# Ecosystem analysis report\n");
    let mut sections = 0usize;

    if let Some(qc) = load(out_dir, artifacts::QC_REPORT, manifest)? {
        sections += 1;
        let _ = write!(
            md,
            "\n## Dataset\n\n\
             | entity | before | after |\n|---|---|---|\n\
             | hackathons | {} | {} |\n\
             | projects | {} | {} |\n\
             | participants | {} | {} |\n",
            field(&qc, "hackathons_before"),
            field(&qc, "hackathons_after"),
            field(&qc, "projects_before"),
            field(&qc, "projects_after"),
            field(&qc, "participants_before"),
            field(&qc, "participants_after"),
        );
        if let Some(link) = load(out_dir, artifacts::LINK_REPORT, manifest)? {
            let _ = write!(
                md,
                "\nRepository linkage: {} of {} projects resolvable ({} matched repos, {} matched events).\n",
                field(&link, "projects_resolvable"),
                field(&link, "projects_total"),
                field(&link, "repos_matched"),
                field(&link, "events_matched"),
            );
        }
        if let Some(skip) = load(out_dir, artifacts::SKIP_REPORT, manifest)? {
            let _ = write!(
                md,
                "Event streams: {} events parsed; {} of {} lines skipped.\n",
                field(&skip, "events_parsed"),
                field(&skip, "lines_skipped"),
                field(&skip, "lines_total"),
            );
        }
    }

    if let Some(trend) = load(out_dir, artifacts::TREND, manifest)? {
        sections += 1;
        md.push_str("\n## Goal alignment trend\n\n");
        if trend.get("available") == Some(&Value::Bool(true)) {
            let fit = trend.get("fit").cloned().unwrap_or(Value::Null);
            let _ = write!(
                md,
                "Share of goal-aligned hackathons per year: slope {} %/year \
                 (intercept {}, R² {}, p {}).\n",
                field(&fit, "slope"),
                field(&fit, "intercept"),
                field(&fit, "r_squared"),
                field(&fit, "p_value"),
            );
        } else {
            let _ = write!(md, "Trend unavailable: {}.\n", field(&trend, "reason"));
        }
    }

    if let Some(fit) = load(out_dir, artifacts::RELAXATION_FIT, manifest)? {
        sections += 1;
        let _ = write!(
            md,
            "\n## Post-burst relaxation\n\n\
             Power-law decay exponent alpha = {} ± {} over {} logarithmic bins \
             (correlation {}, p {}); peak at day offset {}.\n",
            field(&fit, "alpha"),
            field(&fit, "alpha_stderr"),
            field(&fit, "n_bins"),
            field(&fit, "r"),
            field(&fit, "p_value"),
            field(&fit, "t_c"),
        );
        if let Some(class) = load(out_dir, artifacts::CASCADE, manifest)? {
            let _ = write!(md, "Cascade regime: **{}**.\n", field(&class, "label"));
            if let Some(Value::String(note)) = class.get("note") {
                let _ = write!(md, "Note: {note}\n");
            }
        }
    }

    if let Some(fit) = load(out_dir, artifacts::TAIL_FIT, manifest)? {
        sections += 1;
        let _ = write!(
            md,
            "\n## Participation tail\n\n\
             Survival exponent mu = {} ± {} for counts ≥ {} ({} tail observations, \
             KS distance {}).\n",
            field(&fit, "mu"),
            field(&fit, "mu_stderr"),
            field(&fit, "x_min"),
            field(&fit, "n_tail"),
            field(&fit, "ks_distance"),
        );
        if let Some(moments) = load(out_dir, artifacts::MOMENTS, manifest)? {
            if let Some(Value::Array(rows)) = moments.get("moments") {
                for row in rows {
                    let k = field(row, "k");
                    let finite = row.get("finite") == Some(&Value::Bool(true));
                    let name = match k.as_str() {
                        "1" => "mean".to_string(),
                        "2" => "variance".to_string(),
                        other => format!("moment {other}"),
                    };
                    let _ = writeln!(
                        md,
                        "- The {} is {}.",
                        name,
                        if finite { "finite" } else { "divergent" }
                    );
                }
            }
        }
    }

    if let Some(fit) = load(out_dir, artifacts::SCALING_FIT, manifest)? {
        sections += 1;
        let _ = write!(
            md,
            "\n## Productivity scaling\n\n\
             Output grows as contributors^beta with beta = {} ± {} \
             across {} windows of {} days (R² {}).\n",
            field(&fit, "beta"),
            field(&fit, "beta_stderr"),
            field(&fit, "n_windows"),
            field(&fit, "window_days"),
            field(&fit, "r_squared"),
        );
    }

    let newcomers = load(out_dir, artifacts::NEWCOMER_SUMMARY, manifest)?;
    let growth = load(out_dir, artifacts::GROWTH, manifest)?;
    if newcomers.is_some() || growth.is_some() {
        sections += 1;
        md.push_str("\n## Community renewal\n\n");
        if let Some(n) = newcomers {
            let _ = write!(
                md,
                "Median newcomer share {} across {} hackathons.\n",
                field(&n, "median_ratio"),
                field(&n, "hackathons"),
            );
        }
        if let Some(g) = growth {
            let _ = write!(
                md,
                "Weekly hackathon counts grow by {} per week ({} relative to the mean, R² {}){}.\n",
                field(&g, "slope"),
                field(&g, "relative_weekly_rate"),
                field(&g, "r_squared"),
                if g.get("nonlinearity_warning") == Some(&Value::Bool(true)) {
                    "; an exponential fits the counts better than a line"
                } else {
                    ""
                },
            );
        }
    }

    let leaf_path = out_dir.join(artifacts::LEAF_ORDER);
    if leaf_path.is_file() {
        sections += 1;
        manifest.record_input(&leaf_path)?;
        let leaves = std::fs::read_to_string(&leaf_path)?;
        let ordered: Vec<&str> = leaves.lines().collect();
        let _ = write!(
            md,
            "\n## Technology enrichment\n\n\
             {} technologies clustered; dendrogram leaf order: {}.\n",
            ordered.len(),
            ordered.join(", "),
        );
    }

    if let Some(truth) = load(out_dir, artifacts::GROUND_TRUTH, manifest)? {
        sections += 1;
        md.push_str(
            "\n## Planted parameters\n\n\
             This dataset is synthetic; fitted values should match the plants.\n\n\
             | parameter | planted | fitted |\n|---|---|---|\n",
        );
        let fits: [(&str, &str, &str); 3] = [
            ("alpha", artifacts::RELAXATION_FIT, "alpha"),
            ("mu", artifacts::TAIL_FIT, "mu"),
            ("beta", artifacts::SCALING_FIT, "beta"),
        ];
        for (name, file, key) in fits {
            let fitted = load(out_dir, file, manifest)?
                .map(|v| field(&v, key))
                .unwrap_or_else(|| "—".into());
            let _ = writeln!(md, "| {name} | {} | {fitted} |", field(&truth, name));
        }
    }

    if sections == 0 {
        bail!(
            "report: no analysis artifacts in {}; run the other stages first",
            out_dir.display()
        );
    }

    std::fs::write(out_dir.join(artifacts::REPORT), md).context("report: writing report.md")?;
    manifest.record_output(artifacts::REPORT);
    eprintln!("report: {sections} sections written");
    Ok(())
}
