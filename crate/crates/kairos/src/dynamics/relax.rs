//! Power-law relaxation fits of post-peak decay, and the criticality
//! classification of the fitted exponent.

use serde::Serialize;

use super::{StackedSeries, DEFAULT_BINS_PER_DECADE};
use crate::error::{Error, Result};
use crate::stats;

/// Fitted decay `A(t) ~ (t − t_c)^(−alpha)` over a post-peak window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationFit {
    pub alpha: f64,
    pub alpha_stderr: f64,
    /// Peak day (offset of the series maximum; ties take the earliest).
    pub t_c: i64,
    /// Fitted offset range, inclusive, in the series' own day coordinates.
    pub fit_window: (i64, i64),
    /// Correlation of the log-log regression (negative for a decay).
    pub r: f64,
    pub p_value: f64,
    /// Number of populated logarithmic bins the line was fitted on.
    pub n_bins: usize,
    /// Plot-ready binned points: (t − t_c, binned amplitude), both as
    /// geometric means over the bin's positive entries.
    pub binned: Vec<BinPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinPoint {
    pub t_minus_tc: f64,
    pub value: f64,
}

/// Locate the peak: offset of the maximum value, earliest on ties.
fn peak_offset(series: &StackedSeries) -> i64 {
    let mut best = 0usize;
    for (i, &v) in series.values.iter().enumerate() {
        if v > series.values[best] {
            best = i;
        }
    }
    series.offsets[best]
}

/// Fit the post-peak decay on logarithmically binned points.
///
/// The window is inclusive and in the series' offset coordinates; it
/// defaults to everything after the peak, starting at `t_c + 1` (the law
/// diverges at `t_c` itself, so earlier points are rejected). Within each
/// log bin (default 10 per decade) the positive values are reduced to
/// geometric means in both coordinates — on a pure power law the binned
/// points are then exactly collinear in log-log space. Zero-count days
/// carry no logarithmic information and are passed over; at least 10
/// populated bins are required.
pub fn fit_relaxation(
    series: &StackedSeries,
    window: Option<(i64, i64)>,
    bins_per_decade: u32,
) -> Result<RelaxationFit> {
    if bins_per_decade == 0 {
        return Err(Error::InvalidParameter {
            name: "bins_per_decade",
            reason: "must be at least 1".into(),
        });
    }
    if series.offsets.is_empty() {
        return Err(Error::InsufficientData("empty series".into()));
    }
    let t_c = peak_offset(series);
    let t_end = *series.offsets.last().unwrap();
    let (t_min, t_max) = window.unwrap_or((t_c + 1, t_end));
    if t_min <= t_c {
        return Err(Error::InvalidInput(format!(
            "fit window starts at {t_min} but the peak is at {t_c}; \
             t − t_c must be positive, so the window must start at {} or later",
            t_c + 1
        )));
    }
    if t_max < t_min {
        return Err(Error::InvalidInput(format!(
            "empty fit window: {t_min}..{t_max}"
        )));
    }

    // Accumulate log-domain sums per bin index: floor(log10(u) · bins).
    let mut bins: std::collections::BTreeMap<i64, (f64, f64, u32)> = std::collections::BTreeMap::new();
    for (&offset, &value) in series.offsets.iter().zip(&series.values) {
        if offset < t_min || offset > t_max || value <= 0.0 {
            continue;
        }
        let u = (offset - t_c) as f64;
        let idx = (u.log10() * bins_per_decade as f64).floor() as i64;
        let entry = bins.entry(idx).or_insert((0.0, 0.0, 0));
        entry.0 += u.log10();
        entry.1 += value.log10();
        entry.2 += 1;
    }

    let n_bins = bins.len();
    if n_bins < 10 {
        return Err(Error::InsufficientData(format!(
            "only {n_bins} populated log bins in window {t_min}..{t_max}; \
             the decay fit needs at least 10"
        )));
    }

    let mut log_u = Vec::with_capacity(n_bins);
    let mut log_v = Vec::with_capacity(n_bins);
    let mut binned = Vec::with_capacity(n_bins);
    for (lu_sum, lv_sum, count) in bins.into_values() {
        let lu = lu_sum / count as f64;
        let lv = lv_sum / count as f64;
        log_u.push(lu);
        log_v.push(lv);
        binned.push(BinPoint {
            t_minus_tc: 10f64.powf(lu),
            value: 10f64.powf(lv),
        });
    }

    let fit = stats::fit_line(&log_u, &log_v)?;
    Ok(RelaxationFit {
        alpha: -fit.slope,
        alpha_stderr: fit.slope_stderr,
        t_c,
        fit_window: (t_min, t_max),
        r: fit.r,
        p_value: fit.p_value,
        n_bins,
        binned,
    })
}

/// Convenience wrapper using the default binning resolution.
pub fn fit_relaxation_default(series: &StackedSeries) -> Result<RelaxationFit> {
    fit_relaxation(series, None, DEFAULT_BINS_PER_DECADE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CascadeLabel {
    ExogenousCritical,
    SubCritical,
    Indeterminate,
}

/// Criticality verdict for a fitted relaxation exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeClass {
    pub label: CascadeLabel,
    /// Reference renormalization exponent; the expected decay bands sit at
    /// 1 − θ (critical) and 1 + θ (sub-critical).
    pub theta_ref: f64,
    /// How many standard errors the exponent must clear 1 by.
    pub margin_sigmas: f64,
    /// Set when the exponent lands on the far side of its band reference,
    /// hinting at a mixture of relaxation regimes.
    pub note: Option<String>,
}

/// Classify a relaxation fit against the critical boundary at α = 1.
///
/// Exogenous-critical when `alpha + margin·stderr < 1`, sub-critical when
/// `alpha − margin·stderr > 1`, indeterminate otherwise (an exponent of
/// exactly 1 with zero error is indeterminate by construction).
pub fn classify_cascade(fit: &RelaxationFit, theta: f64, margin_sigmas: f64) -> CascadeClass {
    let margin = margin_sigmas * fit.alpha_stderr;
    let label = if fit.alpha + margin < 1.0 {
        CascadeLabel::ExogenousCritical
    } else if fit.alpha - margin > 1.0 {
        CascadeLabel::SubCritical
    } else {
        CascadeLabel::Indeterminate
    };
    let note = match label {
        CascadeLabel::ExogenousCritical if fit.alpha > 1.0 - theta => Some(format!(
            "alpha = {:.3} exceeds the critical-band reference 1 − θ = {:.2}; \
             consistent with mixing toward sub-critical relaxation",
            fit.alpha,
            1.0 - theta
        )),
        CascadeLabel::SubCritical if fit.alpha < 1.0 + theta => Some(format!(
            "alpha = {:.3} falls short of the sub-critical band reference 1 + θ = {:.2}; \
             consistent with mixing toward critical relaxation",
            fit.alpha,
            1.0 + theta
        )),
        _ => None,
    };
    CascadeClass {
        label,
        theta_ref: theta,
        margin_sigmas,
        note,
    }
}
