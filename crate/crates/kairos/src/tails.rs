//! Heavy-tailed participation statistics: empirical survival functions,
//! discrete power-law maximum-likelihood fits with automatic lower-cutoff
//! selection, moment-stability reporting, and an exact inverse-CDF sampler.
//!
//! Convention: the exponent `mu` always refers to the survival function,
//! P(X > x) ~ x^(-mu) with a strict inequality. The probability mass at x is
//! then proportional to x^(-(mu+1)), normalized by the Hurwitz zeta function
//! ζ(mu+1, x_min). All public parameters and results use the survival-form
//! exponent; the pmf-form exponent appears only inside the likelihood.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{golden_min, hurwitz_zeta, hurwitz_zeta_log_d2};

/// Exponent search interval for the maximum-likelihood fit.
const MU_LO: f64 = 1.01;
const MU_HI: f64 = 6.0;
/// Golden-section convergence tolerance on mu.
const MU_TOL: f64 = 1e-6;
/// Minimum number of observations at or above a usable lower cutoff.
const MIN_TAIL: usize = 10;

/// Maximum-likelihood fit of a discrete power-law tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    /// Survival-function exponent, P(X > x) ~ x^(-mu).
    pub mu: f64,
    /// Standard error of `mu` from the observed Fisher information.
    pub mu_stderr: f64,
    /// Lower cutoff: the fit covers observations with x >= x_min.
    pub x_min: u64,
    /// Log-likelihood at the optimum (signed; negative for real samples).
    pub log_likelihood: f64,
    /// Number of observations with x >= x_min.
    pub n_tail: usize,
    /// Kolmogorov–Smirnov distance between the empirical and fitted
    /// survival functions over the tail, evaluated at observed values.
    pub ks_distance: f64,
}

/// Which low-order moments of a fitted tail are finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentStability {
    /// Survival-function exponent the verdicts are derived from.
    pub mu: f64,
    /// Names the exponent convention so the finiteness rule is unambiguous:
    /// under P(X > x) ~ x^(-mu), the k-th moment is finite iff mu > k.
    pub convention: &'static str,
    pub moments: Vec<MomentFiniteness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentFiniteness {
    /// Moment order: 1 = mean, 2 = variance.
    pub k: u32,
    pub finite: bool,
}

/// Empirical survival function of a sample of positive integers.
///
/// Returns one `(x, P(X > x))` pair per distinct observed value in
/// ascending order. The sequence is monotone non-increasing, starts at or
/// below 1, and ends with probability 0 at the sample maximum.
pub fn empirical_ccdf(values: &[u64]) -> Result<Vec<(u64, f64)>> {
    let counts = distinct_counts(values)?;
    let n = values.len() as f64;
    let mut above: u64 = values.len() as u64;
    let mut out = Vec::with_capacity(counts.len());
    for &(x, c) in &counts {
        above -= c;
        out.push((x, above as f64 / n));
    }
    Ok(out)
}

/// Survival function of the fitted law: P(X > x) = ζ(mu+1, x+1) / ζ(mu+1, x_min).
///
/// Evaluates to 1 below the cutoff.
pub fn model_ccdf(mu: f64, x_min: u64, x: u64) -> f64 {
    if x < x_min {
        return 1.0;
    }
    let s = mu + 1.0;
    hurwitz_zeta(s, x as f64 + 1.0) / hurwitz_zeta(s, x_min as f64)
}

/// Fit a discrete power law to the tail of `values`.
///
/// With `x_min` given, fits the exponent on observations at or above it.
/// Without it, every distinct observed value that keeps at least ten tail
/// observations is tried as a cutoff and the one minimizing the
/// Kolmogorov–Smirnov distance wins; ties go to the smaller cutoff (larger
/// sample). Candidate cutoffs are evaluated in parallel; selection is
/// deterministic and independent of input order.
pub fn fit_tail(values: &[u64], x_min: Option<u64>) -> Result<TailFit> {
    let counts = distinct_counts(values)?;
    if counts.len() == 1 {
        return Err(Error::DegenerateSupport(format!(
            "all {} values equal {}; a power-law exponent is unidentifiable",
            values.len(),
            counts[0].0
        )));
    }

    // Suffix aggregates over the distinct values: observations and summed
    // log-values at or above each candidate cutoff.
    let m = counts.len();
    let mut tail_n = vec![0u64; m + 1];
    let mut tail_ln_sum = vec![0.0f64; m + 1];
    for i in (0..m).rev() {
        let (x, c) = counts[i];
        tail_n[i] = tail_n[i + 1] + c;
        tail_ln_sum[i] = tail_ln_sum[i + 1] + c as f64 * (x as f64).ln();
    }

    let candidate_indices: Vec<usize> = match x_min {
        Some(xm) => {
            if xm < counts[0].0 {
                // A cutoff below every observation behaves like the smallest
                // observed value; snap to it so x_min >= min(values) holds.
                vec![0]
            } else {
                let i = counts.partition_point(|&(x, _)| x < xm);
                if i >= m || counts[i].0 != xm {
                    return Err(Error::InvalidInput(format!(
                        "requested cutoff {xm} is not an observed value"
                    )));
                }
                vec![i]
            }
        }
        None => (0..m).collect(),
    };

    let fits: Vec<Option<TailFit>> = candidate_indices
        .par_iter()
        .map(|&i| fit_at_cutoff(&counts, &tail_n, &tail_ln_sum, i))
        .collect();

    let mut best: Option<TailFit> = None;
    for fit in fits.into_iter().flatten() {
        let replace = match &best {
            None => true,
            // Strict comparison keeps the smaller cutoff on ties because
            // candidates arrive in ascending x_min order.
            Some(b) => fit.ks_distance < b.ks_distance,
        };
        if replace {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| {
        Error::InsufficientData(format!(
            "no usable cutoff: need at least {MIN_TAIL} observations at or above \
             x_min spanning more than one distinct value (sample size {})",
            values.len()
        ))
    })
}

/// Fit the exponent with the cutoff fixed at `counts[i].0`.
fn fit_at_cutoff(
    counts: &[(u64, u64)],
    tail_n: &[u64],
    tail_ln_sum: &[f64],
    i: usize,
) -> Option<TailFit> {
    let m = counts.len();
    let n = tail_n[i] as usize;
    if n < MIN_TAIL || m - i < 2 {
        return None;
    }
    let x_min = counts[i].0;
    let nf = n as f64;
    let ln_sum = tail_ln_sum[i];
    let a = x_min as f64;

    // Negative log-likelihood in the survival-form exponent; the pmf form
    // p(x) = x^(-(mu+1)) / ζ(mu+1, x_min) makes this (mu+1)·Σln x + n·ln ζ.
    let neg_ll = |mu: f64| {
        let s = mu + 1.0;
        s * ln_sum + nf * hurwitz_zeta(s, a).ln()
    };
    let mu = golden_min(neg_ll, MU_LO, MU_HI, MU_TOL);
    let log_likelihood = -neg_ll(mu);

    // Observed information: the curvature of the negative log-likelihood is
    // n · d²/ds² ln ζ(s, x_min) at the optimum.
    let info = nf * hurwitz_zeta_log_d2(mu + 1.0, a);
    let mu_stderr = if info > 0.0 {
        1.0 / info.sqrt()
    } else {
        f64::INFINITY
    };

    // KS distance over the tail at observed distinct values.
    let s = mu + 1.0;
    let norm = hurwitz_zeta(s, a);
    let mut ks = 0.0f64;
    for j in i..m {
        let x = counts[j].0;
        let emp = tail_n[j + 1] as f64 / nf;
        let model = hurwitz_zeta(s, x as f64 + 1.0) / norm;
        ks = ks.max((emp - model).abs());
    }

    Some(TailFit {
        mu,
        mu_stderr,
        x_min,
        log_likelihood,
        n_tail: n,
        ks_distance: ks,
    })
}

/// Report whether the mean and variance of the fitted law are finite.
///
/// Under the survival convention P(X > x) ~ x^(-mu) the k-th moment is
/// finite exactly when mu > k, so mu = 2.37 has a stable mean and variance
/// while mu = 1.5 has a stable mean only.
pub fn moment_stability(fit: &TailFit) -> MomentStability {
    MomentStability {
        mu: fit.mu,
        convention: "survival: P(X > x) ~ x^-mu; k-th moment finite iff mu > k",
        moments: (1..=2)
            .map(|k| MomentFiniteness {
                k,
                finite: fit.mu > k as f64,
            })
            .collect(),
    }
}

/// Exact inverse-CDF sampler for the discrete power law.
///
/// Draws from p(x) = x^(-(mu+1)) / ζ(mu+1, x_min) on {x_min, x_min+1, ...},
/// i.e. a tail with survival exponent `mu`. A cumulative table covers the
/// bulk of the mass; the remote tail (table truncated at survival mass
/// 1e-12 or two million entries) falls back to bisection against the
/// analytic survival function, so sampling is exact for every u.
#[derive(Debug, Clone)]
pub struct ZetaSampler {
    x_min: u64,
    /// Internal pmf-form exponent, mu + 1.
    s: f64,
    /// ζ(s, x_min), the normalizing constant.
    norm: f64,
    /// cdf[i] = P(X <= x_min + i).
    cdf: Vec<f64>,
}

impl ZetaSampler {
    const TAIL_EPS: f64 = 1e-12;
    const MAX_TABLE: usize = 2_000_000;

    pub fn new(mu: f64, x_min: u64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("survival exponent must be positive, got {mu}"),
            });
        }
        if x_min == 0 {
            return Err(Error::InvalidParameter {
                name: "x_min",
                reason: "support starts at a positive integer".into(),
            });
        }
        let s = mu + 1.0;
        let norm = hurwitz_zeta(s, x_min as f64);
        let mut cdf = Vec::new();
        let mut acc = 0.0f64;
        let mut x = x_min as f64;
        loop {
            acc += x.powf(-s) / norm;
            cdf.push(acc);
            if 1.0 - acc < Self::TAIL_EPS || cdf.len() >= Self::MAX_TABLE {
                break;
            }
            x += 1.0;
        }
        Ok(Self { x_min, s, norm, cdf })
    }

    /// Survival function of the sampled law, P(X > x).
    pub fn ccdf(&self, x: u64) -> f64 {
        if x < self.x_min {
            return 1.0;
        }
        hurwitz_zeta(self.s, x as f64 + 1.0) / self.norm
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        if i < self.cdf.len() {
            self.x_min + i as u64
        } else {
            self.sample_beyond_table(u)
        }
    }

    pub fn sample_many<R: rand::Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<u64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Smallest x with P(X <= x) > u for a u past the table end, located by
    /// exponential growth then bisection on the analytic survival function.
    fn sample_beyond_table(&self, u: f64) -> u64 {
        let tail = 1.0 - u; // target survival mass, < TAIL_EPS
        let mut lo = self.x_min + self.cdf.len() as u64 - 1; // ccdf(lo) >= tail
        let mut hi = lo.saturating_mul(2).max(lo + 1);
        while self.ccdf(hi) > tail {
            lo = hi;
            hi = hi.saturating_mul(2);
            if hi == u64::MAX {
                break;
            }
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if self.ccdf(mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Distinct values with multiplicities, ascending. Rejects empty input and
/// zeros (the laws here live on positive integers).
fn distinct_counts(values: &[u64]) -> Result<Vec<(u64, u64)>> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "empty sample: nothing to fit or tabulate".into(),
        ));
    }
    if values.contains(&0) {
        return Err(Error::InvalidInput(
            "values must be positive integers; found 0".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut counts: Vec<(u64, u64)> = Vec::new();
    for v in sorted {
        match counts.last_mut() {
            Some((x, c)) if *x == v => *c += 1,
            _ => counts.push((v, 1)),
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ccdf_small_examples() {
        assert_eq!(
            empirical_ccdf(&[1, 1, 2]).unwrap(),
            vec![(1, 1.0 / 3.0), (2, 0.0)]
        );
        assert_eq!(empirical_ccdf(&[5]).unwrap(), vec![(5, 0.0)]);
    }

    #[test]
    fn ccdf_rejects_empty_and_zero() {
        assert!(empirical_ccdf(&[]).is_err());
        assert!(empirical_ccdf(&[0, 1]).is_err());
    }

    #[test]
    fn ccdf_matches_brute_force_on_planted_draws() {
        let sampler = ZetaSampler::new(1.5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = sampler.sample_many(&mut rng, 1000);
        let ccdf = empirical_ccdf(&draws).unwrap();
        for &(x, p) in &ccdf {
            let brute = draws.iter().filter(|&&v| v > x).count() as f64 / draws.len() as f64;
            assert_eq!(p, brute, "ccdf mismatch at x = {x}");
        }
        // Monotone non-increasing, starts <= 1, ends at 0.
        assert!(ccdf[0].1 <= 1.0);
        assert!(ccdf.windows(2).all(|w| w[0].1 >= w[1].1));
        assert_eq!(ccdf.last().unwrap().1, 0.0);
    }

    #[test]
    fn fit_rejects_degenerate_and_thin_samples() {
        let same = vec![7u64; 50];
        match fit_tail(&same, None) {
            Err(Error::DegenerateSupport(_)) => {}
            other => panic!("expected degenerate-support error, got {other:?}"),
        }
        let thin = vec![1, 2, 3, 4, 5];
        assert!(matches!(
            fit_tail(&thin, None),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn fit_recovers_planted_exponent() {
        let sampler = ZetaSampler::new(2.5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = sampler.sample_many(&mut rng, 100_000);
        let fit = fit_tail(&draws, None).unwrap();
        assert!(
            (fit.mu - 2.5).abs() < 0.05,
            "recovered mu = {} should be within 0.05 of 2.5",
            fit.mu
        );
        assert!(fit.mu > 1.0);
        assert!(fit.x_min >= 1);
        assert!(fit.n_tail >= 10);
        assert!(fit.log_likelihood < 0.0);
    }

    #[test]
    fn fit_is_locally_optimal() {
        let sampler = ZetaSampler::new(2.37, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = sampler.sample_many(&mut rng, 5000);
        let fit = fit_tail(&draws, None).unwrap();
        let tail: Vec<u64> = draws.iter().copied().filter(|&v| v >= fit.x_min).collect();
        let ll = |mu: f64| {
            let s = mu + 1.0;
            let ln_sum: f64 = tail.iter().map(|&v| (v as f64).ln()).sum();
            -(s * ln_sum + tail.len() as f64 * hurwitz_zeta(s, fit.x_min as f64).ln())
        };
        assert!((ll(fit.mu) - fit.log_likelihood).abs() < 1e-6);
        for nudge in [-0.1, 0.1] {
            let mu = (fit.mu + nudge).clamp(MU_LO, MU_HI);
            assert!(
                fit.log_likelihood >= ll(mu),
                "likelihood at fitted mu must beat mu {nudge:+}"
            );
        }
    }

    #[test]
    fn fit_honours_explicit_cutoff() {
        let sampler = ZetaSampler::new(2.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let draws = sampler.sample_many(&mut rng, 20_000);
        let fit = fit_tail(&draws, Some(3)).unwrap();
        assert_eq!(fit.x_min, 3);
        assert_eq!(fit.n_tail, draws.iter().filter(|&&v| v >= 3).count());
        // A cutoff that never occurs in the sample is rejected.
        let gappy = [vec![1u64; 30], vec![4u64; 15], vec![9u64; 5]].concat();
        assert!(fit_tail(&gappy, Some(3)).is_err());
    }

    #[test]
    fn cutoff_selection_tracks_planted_value() {
        // Statistical regression with fixed seeds: the KS-selected cutoff
        // stays within +2 of the planted one in at least 90 of 100 trials.
        let sampler = ZetaSampler::new(2.37, 4).unwrap();
        let mut within = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws = sampler.sample_many(&mut rng, 2000);
            let fit = fit_tail(&draws, None).unwrap();
            assert!(fit.x_min >= 4, "cutoff below the sample minimum");
            if fit.x_min <= 6 {
                within += 1;
            }
        }
        assert!(within >= 90, "cutoff within +2 in only {within}/100 trials");
    }

    #[test]
    fn moment_reports_follow_the_exponent() {
        let fit = |mu: f64| TailFit {
            mu,
            mu_stderr: 0.0,
            x_min: 1,
            log_likelihood: 0.0,
            n_tail: 10,
            ks_distance: 0.0,
        };
        let verdicts =
            |mu: f64| -> Vec<bool> { moment_stability(&fit(mu)).moments.iter().map(|m| m.finite).collect() };
        assert_eq!(verdicts(2.37), vec![true, true]);
        assert_eq!(verdicts(1.5), vec![true, false]);
        assert_eq!(verdicts(3.1), vec![true, true]);
    }

    #[test]
    fn sampler_is_deterministic_and_respects_support() {
        let sampler = ZetaSampler::new(2.37, 4).unwrap();
        let a = sampler.sample_many(&mut ChaCha8Rng::seed_from_u64(5), 5000);
        let b = sampler.sample_many(&mut ChaCha8Rng::seed_from_u64(5), 5000);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| v >= 4));
    }

    #[test]
    fn sampler_tail_fallback_is_exact() {
        let sampler = ZetaSampler::new(1.2, 1).unwrap();
        // Drive the beyond-table path directly with a u extremely close to 1.
        let u = 1.0 - 0.25e-12;
        let x = sampler.sample_beyond_table(u);
        assert!(sampler.ccdf(x) <= 1.0 - u);
        assert!(sampler.ccdf(x - 1) > 1.0 - u);
    }

    #[test]
    fn sampler_rejects_bad_parameters() {
        assert!(ZetaSampler::new(0.0, 1).is_err());
        assert!(ZetaSampler::new(-1.0, 2).is_err());
        assert!(ZetaSampler::new(2.0, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ccdf_is_monotone_and_bounded(values in prop::collection::vec(1u64..200, 1..300)) {
            let ccdf = empirical_ccdf(&values).unwrap();
            prop_assert!(ccdf[0].1 <= 1.0);
            prop_assert!(ccdf.windows(2).all(|w| w[0].1 >= w[1].1));
            prop_assert_eq!(ccdf.last().unwrap().1, 0.0);
        }

        #[test]
        fn fit_ignores_input_order(mut values in prop::collection::vec(1u64..40, 30..120), rot in 0usize..100) {
            if let Ok(base) = fit_tail(&values, None) {
                let n = values.len();
                values.rotate_left(rot % n);
                values.reverse();
                let permuted = fit_tail(&values, None).unwrap();
                prop_assert_eq!(base, permuted);
            }
        }
    }
}
