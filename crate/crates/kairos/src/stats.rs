//! Shared numerics: ordinary least squares with slope inference, special
//! functions (log-gamma, regularized incomplete beta, Student-t tail,
//! Hurwitz zeta) and scalar minimization.
//!
//! Everything here is deterministic and allocation-free so fits are pure
//! functions of their inputs.

use crate::error::{Error, Result};

/// Ordinary least-squares line fit with slope inference.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation of x and y.
    pub r: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    /// Two-sided p-value of the slope against zero (Student t, n-2 df).
    pub p_value: f64,
    pub n: usize,
    /// Set when y carries no variance; slope, r and p are then reported as
    /// 0, 0 and 1 rather than NaN.
    pub degenerate: bool,
}

/// Least-squares fit of `y = intercept + slope * x`.
///
/// Requires at least two points and nonzero variance in `x`. With a perfect
/// fit the p-value is 0 for a nonzero slope and 1 for a flat line.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "x and y lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "line fit needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "zero variance in x; slope is undefined".into(),
        ));
    }
    if syy == 0.0 {
        return Ok(LineFit {
            slope: 0.0,
            intercept: mean_y,
            r: 0.0,
            r_squared: 0.0,
            slope_stderr: 0.0,
            p_value: 1.0,
            n,
            degenerate: true,
        });
    }

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r = sxy / (sxx * syy).sqrt();
    // Clamp against rounding: ss_res = syy (1 - r^2) can dip below zero.
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);

    let df = n as f64 - 2.0;
    let (slope_stderr, p_value) = if df < 1.0 {
        (f64::INFINITY, 1.0)
    } else if ss_res == 0.0 {
        (0.0, if slope == 0.0 { 1.0 } else { 0.0 })
    } else {
        let se = (ss_res / df / sxx).sqrt();
        let t = slope / se;
        (se, student_t_two_sided(t.abs(), df))
    };

    Ok(LineFit {
        slope,
        intercept,
        r,
        r_squared,
        slope_stderr,
        p_value,
        n,
        degenerate: false,
    })
}

/// Natural log of the gamma function for positive arguments (Lanczos, g=7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta function I_x(a, b) by continued fraction.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta_inc arguments must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Lentz continued fraction for the incomplete beta function.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Two-sided p-value of a Student-t statistic with `df` degrees of freedom.
pub fn student_t_two_sided(t_abs: f64, df: f64) -> f64 {
    if !t_abs.is_finite() {
        return 0.0;
    }
    beta_inc(df / 2.0, 0.5, df / (df + t_abs * t_abs)).clamp(0.0, 1.0)
}

/// Hurwitz zeta function ζ(s, a) = Σ_{k≥0} (a+k)^-s for s > 1, a > 0.
///
/// Euler–Maclaurin with Bernoulli corrections through B8; relative error is
/// below 1e-14 for s in (1, 8].
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta requires s > 1, got {s}");
    assert!(a > 0.0, "hurwitz_zeta requires a > 0, got {a}");
    let cut = 25.0;
    let n = if a >= cut { 0 } else { (cut - a).ceil() as usize };
    let mut sum = 0.0;
    for k in 0..n {
        sum += (a + k as f64).powf(-s);
    }
    let q = a + n as f64;
    let qs = q.powf(-s);
    sum += q * qs / (s - 1.0); // q^(1-s)/(s-1)
    sum += 0.5 * qs;
    let q2 = q * q;
    let mut rising = s; // s(s+1)...(s+2j-2)
    sum += rising / 12.0 * qs / q;
    rising *= (s + 1.0) * (s + 2.0);
    sum -= rising / 720.0 * qs / (q2 * q);
    rising *= (s + 3.0) * (s + 4.0);
    sum += rising / 30_240.0 * qs / (q2 * q2 * q);
    rising *= (s + 5.0) * (s + 6.0);
    sum -= rising / 1_209_600.0 * qs / (q2 * q2 * q2 * q);
    sum
}

/// Second derivative of ln ζ(s, a) in s, by central differences.
pub fn hurwitz_zeta_log_d2(s: f64, a: f64) -> f64 {
    let h = 1e-4;
    let f = |s: f64| hurwitz_zeta(s, a).ln();
    (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
