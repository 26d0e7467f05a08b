//! Singularity-order estimation, growth-rate fitting, and extrapolated
//! evaluation of the boundary limits that characterize corner and cusp
//! metrics.
//!
//! Everything near the puncture converges only logarithmically: the
//! quantities of interest behave like `g(r) = g₀ + c₁/L + c₂/L² + …` with
//! `L = log(1/r)`, so sampling at r = 1e-6 alone leaves errors of several
//! percent. Every limit here is therefore extrapolated from a ladder of
//! shrinking radii. Two accelerators are run side by side on each ladder —
//! polynomial extrapolation to zero in the ladder variable and iterated
//! Aitken Δ² — and the one whose answer moves less when the finest sample
//! is dropped wins. The spread between the two windows is reported as the
//! extrapolation error; the raw finest sample rides along so a caller can
//! see how much the acceleration actually did.

use num_complex::Complex64;
use thiserror::Error;

use crate::exec::par_map;
use crate::metrics::{wirtinger_deriv, ComplexPoint, MetricField, MetricsError};

/// Errors from sampling, fitting, and extrapolation.
#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("limit did not settle: estimate {estimate} with window spread {spread:e}")]
    NonConvergence { estimate: f64, spread: f64 },
    #[error("sample tail oscillates; no limit extracted")]
    OscillatingTail,
    #[error("degenerate design matrix: radii too clustered to separate the exponents")]
    DegenerateDesign,
    #[error("sampled envelope grows toward the puncture: {first} at the widest radius, {last} at the smallest")]
    Divergence { first: f64, last: f64 },
}

// ---------------------------------------------------------------------
// Extrapolation engine
// ---------------------------------------------------------------------

// Polynomial extrapolation to x = 0 through (xs, ys), Neville's scheme.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut t = ys.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            let (x0, x1) = (xs[i], xs[i + level]);
            t[i] = (x0 * t[i + 1] - x1 * t[i]) / (x0 - x1);
        }
    }
    t[0]
}

// Iterated Aitken Δ²; each pass removes one geometric error mode. The
// last surviving entry is the most-accelerated, finest-window value.
fn aitken_limit(seq: &[f64], max_passes: usize) -> f64 {
    let mut s = seq.to_vec();
    let mut passes = 0;
    while s.len() >= 3 && passes < max_passes {
        let mut next = Vec::with_capacity(s.len() - 2);
        for i in 0..s.len() - 2 {
            let den = s[i + 2] - 2.0 * s[i + 1] + s[i];
            if den.abs() < 1e-300 {
                next.push(s[i + 2]);
            } else {
                let d = s[i + 1] - s[i];
                next.push(s[i] - d * d / den);
            }
        }
        s = next;
        passes += 1;
    }
    *s.last().expect("sequence never drained")
}

// Dual-candidate limit of `seq` sampled at abscissae `xs` shrinking toward
// zero (finest sample last). Returns (value, spread) where spread is the
// winning candidate's full-window vs drop-finest-window disagreement.
fn auto_limit(xs: &[f64], seq: &[f64]) -> (f64, f64) {
    debug_assert_eq!(xs.len(), seq.len());
    let n = seq.len();
    let mx = seq.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mn = seq.iter().cloned().fold(f64::INFINITY, f64::min);
    if mx - mn == 0.0 {
        return (seq[n - 1], 0.0);
    }
    let passes = 4.min((n - 1) / 2);
    let nev_full = neville_at_zero(xs, seq);
    let nev_short = neville_at_zero(&xs[..n - 1], &seq[..n - 1]);
    let ait_full = aitken_limit(seq, passes);
    let ait_short = aitken_limit(&seq[..n - 1], passes);
    let dn = (nev_full - nev_short).abs();
    let da = (ait_full - ait_short).abs();
    if dn <= da {
        (nev_full, dn)
    } else {
        (ait_full, da)
    }
}

fn check_tail_oscillation(seq: &[f64]) -> Result<(), AsymptoticsError> {
    let m = seq.len().min(5);
    let tail = &seq[seq.len() - m..];
    let scale = 1e-10 * tail.last().unwrap().abs().max(1.0);
    let diffs: Vec<f64> = tail
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > scale)
        .collect();
    if diffs.len() >= 4 {
        let alternating = diffs.windows(2).all(|w| w[0] * w[1] < 0.0);
        let growing = diffs.last().unwrap().abs() >= diffs[0].abs();
        if alternating && growing {
            return Err(AsymptoticsError::OscillatingTail);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Result types
// ---------------------------------------------------------------------

/// Singularity order measured from the growth of `max_θ log λ`.
#[derive(Debug, Clone)]
pub struct OrderEstimate {
    /// Extrapolated slope of `M(r)` against `log(1/r)`.
    pub alpha: f64,
    /// The sampled pairs `(r, M(r))`, widest radius first.
    pub samples: Vec<(f64, f64)>,
    /// RMS deviation of the samples from the affine model `c + α·log(1/r)`.
    pub regression_residual: f64,
}

/// Least-squares exponents of `g(r) ≈ C · r^p · (log 1/r)^q`.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub p: f64,
    pub q: f64,
    /// Multiplicative constant of the fitted model.
    pub c: f64,
    /// Coefficient of determination in log coordinates, clamped to [0, 1].
    pub r_squared: f64,
}

/// An extrapolated limit with its raw tail and a spread-based error bar.
#[derive(Debug, Clone, Copy)]
pub struct LimitEstimate {
    pub value: f64,
    /// The un-extrapolated sample at the smallest radius.
    pub raw_tail: f64,
    /// Disagreement of the winning accelerator between its full window
    /// and the window with the finest sample removed.
    pub extrapolation_error: f64,
}

fn limit_from(xs: &[f64], seq: &[f64]) -> LimitEstimate {
    let (value, spread) = auto_limit(xs, seq);
    LimitEstimate {
        value,
        raw_tail: *seq.last().expect("non-empty sample ladder"),
        extrapolation_error: spread,
    }
}

// ---------------------------------------------------------------------
// Radius ladders
// ---------------------------------------------------------------------

const ORDER_THETA_SAMPLES: usize = 64;
const LIMIT_THETA_SAMPLES: usize = 32;
const DERIV_THETA_SAMPLES: usize = 8;

fn validate_radii(radii: &[f64], min_len: usize) -> Result<(), AsymptoticsError> {
    if radii.len() < min_len {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "need at least {min_len} radii, got {}",
            radii.len()
        )));
    }
    for r in radii {
        if !(r.is_finite() && *r > 0.0 && *r < 1.0) {
            return Err(AsymptoticsError::InvalidParameter(format!(
                "radii must lie in (0, 1), got {r}"
            )));
        }
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(AsymptoticsError::InvalidParameter(
            "radii must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

// e^{-k} ladder clamped inside the field's domain, finest radius last.
pub(crate) fn domain_ladder(
    field: &MetricField,
    k_lo: u32,
    k_hi: u32,
    min_len: usize,
) -> Result<Vec<f64>, AsymptoticsError> {
    let d = field.domain();
    let outer = d.outer_radius();
    let inner = d.inner_exclusion();
    let mut radii = Vec::new();
    for k in k_lo..=k_hi {
        let r = (-(k as f64)).exp();
        if r < 0.9 * outer && r > 1.2 * inner {
            radii.push(r);
        }
    }
    if radii.len() < min_len {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "domain ({inner:e}, {outer:e}) leaves only {} usable radii of the {min_len} needed",
            radii.len()
        )));
    }
    Ok(radii)
}

fn inv_l(radii: &[f64]) -> Vec<f64> {
    radii.iter().map(|r| -1.0 / r.ln()).collect()
}

// ---------------------------------------------------------------------
// Order estimation and rate fitting
// ---------------------------------------------------------------------

/// Measure the singularity order of a density from the slope of
/// `M(r) = max_θ log λ(r e^{iθ})` against `log(1/r)`.
///
/// The slope is formed on consecutive radius pairs and the pair slopes are
/// extrapolated; this removes the `log log` shifts that make the plain
/// ratio `M/L` converge hopelessly slowly for cusps.
pub fn estimate_order(
    field: &MetricField,
    radii: &[f64],
) -> Result<OrderEstimate, AsymptoticsError> {
    validate_radii(radii, 4)?;
    let center = field.domain().center().as_complex();
    let rows: Vec<Result<f64, MetricsError>> = par_map(radii, |&r| {
        let mut m = f64::NEG_INFINITY;
        for k in 0..ORDER_THETA_SAMPLES {
            let t = k as f64 / ORDER_THETA_SAMPLES as f64 * std::f64::consts::TAU;
            let z = center + Complex64::from_polar(r, t);
            let v = field.eval_c(z)?;
            m = m.max(v.ln());
        }
        Ok(m)
    });
    let mut ms = Vec::with_capacity(radii.len());
    for row in rows {
        ms.push(row?);
    }

    let ls: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let mut slopes = Vec::with_capacity(ms.len() - 1);
    let mut mids = Vec::with_capacity(ms.len() - 1);
    for i in 0..ms.len() - 1 {
        slopes.push((ms[i + 1] - ms[i]) / (ls[i + 1] - ls[i]));
        mids.push(2.0 / (ls[i] + ls[i + 1]));
    }
    let (alpha, spread) = auto_limit(&mids, &slopes);
    if spread > 0.05 {
        return Err(AsymptoticsError::NonConvergence {
            estimate: alpha,
            spread,
        });
    }

    // Residual of the affine model with the extrapolated slope and the
    // intercept that best fits it.
    let n = ms.len() as f64;
    let intercept = ms
        .iter()
        .zip(&ls)
        .map(|(m, l)| m - alpha * l)
        .sum::<f64>()
        / n;
    let residual = (ms
        .iter()
        .zip(&ls)
        .map(|(m, l)| {
            let d = m - (intercept + alpha * l);
            d * d
        })
        .sum::<f64>()
        / n)
        .sqrt();

    Ok(OrderEstimate {
        alpha,
        samples: radii.iter().cloned().zip(ms).collect(),
        regression_residual: residual,
    })
}

// Least squares through modified Gram-Schmidt QR; columns are the design
// matrix, breakdown reported when a column loses all independent content.
fn mgs_lsq(cols: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>, AsymptoticsError> {
    let k = cols.len();
    let n = y.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    for (j, col) in cols.iter().enumerate() {
        let orig_norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = col.clone();
        for (i, qi) in q.iter().enumerate() {
            let proj: f64 = qi.iter().zip(&v).map(|(a, b)| a * b).sum();
            r[i][j] = proj;
            for t in 0..n {
                v[t] -= proj * qi[t];
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-10 * orig_norm.max(1e-30) {
            return Err(AsymptoticsError::DegenerateDesign);
        }
        r[j][j] = norm;
        for t in 0..n {
            v[t] /= norm;
        }
        q.push(v);
    }
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s: f64 = q[i].iter().zip(y).map(|(a, b)| a * b).sum();
        for j in i + 1..k {
            s -= r[i][j] * beta[j];
        }
        beta[i] = s / r[i][i];
    }
    Ok(beta)
}

fn fit_in_log_coords(
    samples: &[(f64, f64)],
    free_q: bool,
) -> Result<RateFit, AsymptoticsError> {
    if samples.len() < 5 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "need at least 5 samples, got {}",
            samples.len()
        )));
    }
    for (r, g) in samples {
        if !(r.is_finite() && *r > 0.0 && *r < 1.0) {
            return Err(AsymptoticsError::InvalidParameter(format!(
                "radii must lie in (0, 1), got {r}"
            )));
        }
        if !(g.is_finite() && *g > 0.0) {
            return Err(AsymptoticsError::InvalidParameter(format!(
                "samples must be positive to fit exponents, got {g}"
            )));
        }
    }
    if samples.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(AsymptoticsError::InvalidParameter(
            "radii must be strictly decreasing".into(),
        ));
    }
    let n = samples.len();
    let y: Vec<f64> = samples.iter().map(|(_, g)| g.ln()).collect();
    let ones = vec![1.0; n];
    let log_r: Vec<f64> = samples.iter().map(|(r, _)| r.ln()).collect();
    let log_l: Vec<f64> = samples.iter().map(|(r, _)| (-r.ln()).ln()).collect();

    let (beta, q) = if free_q {
        let beta = mgs_lsq(&[ones.clone(), log_r.clone(), log_l.clone()], &y)?;
        (vec![beta[0], beta[1]], beta[2])
    } else {
        let beta = mgs_lsq(&[ones.clone(), log_r.clone()], &y)?;
        (beta, 0.0)
    };
    let (log_c, p) = (beta[0], beta[1]);

    let mean = y.iter().sum::<f64>() / n as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for i in 0..n {
        let fit = log_c + p * log_r[i] + q * log_l[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RateFit {
        p,
        q,
        c: log_c.exp(),
        r_squared,
    })
}

/// Fit `g(r) ≈ C · r^p · (log 1/r)^q` by least squares in
/// `(log r, log log(1/r))` coordinates. Exact on noise-free power-log data.
pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit, AsymptoticsError> {
    fit_in_log_coords(samples, true)
}

/// Extrapolate `g(r) = g₀ + c₁/L + c₂/L² + …` (L = log 1/r) to r → 0.
pub fn richardson_limit(samples: &[(f64, f64)]) -> Result<LimitEstimate, AsymptoticsError> {
    if samples.len() < 4 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    let radii: Vec<f64> = samples.iter().map(|s| s.0).collect();
    validate_radii(&radii, 4)?;
    let seq: Vec<f64> = samples.iter().map(|s| s.1).collect();
    for g in &seq {
        if !g.is_finite() {
            return Err(AsymptoticsError::InvalidParameter(
                "samples must be finite".into(),
            ));
        }
    }
    check_tail_oscillation(&seq)?;
    Ok(limit_from(&inv_l(&radii), &seq))
}

// ---------------------------------------------------------------------
// Remainder derivative rates
// ---------------------------------------------------------------------

/// One derivative pattern of a remainder, its fitted decay, and the
/// exponents the comparison theory predicts for that pattern.
#[derive(Debug, Clone, Copy)]
pub struct RateCheck {
    pub n1: u32,
    pub n2: u32,
    pub predicted_p: f64,
    pub predicted_q: f64,
    pub fit: RateFit,
}

/// Rate report over all derivative patterns up to a total order.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub alpha: f64,
    pub checks: Vec<RateCheck>,
}

/// Measure `|∂̄^{n1}∂^{n2} rem|` along shrinking radii for every pattern
/// with `1 ≤ n1+n2 ≤ n` and fit the decay exponents.
///
/// Corners (α < 1) decay in pure powers, so the log exponent is pinned to
/// zero and only `p` is fitted; predicted `p` is `1−2α` at first order
/// (floored at 0 for α ≤ 1/2, where the first derivatives stay bounded)
/// and `2−2α−m` at order `m ≥ 2`. Cusps (α = 1) are fitted with both
/// exponents free; predicted `(p, q)` is `(−m, −2)` for pure patterns and
/// `(−m, −3)` for mixed ones.
pub fn check_remainder_rates<F>(
    rem: F,
    alpha: f64,
    n: u32,
) -> Result<RateReport, AsymptoticsError>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    // Corner rates converge in powers of r, so a moderate ladder reaches
    // the asymptotic regime while staying clear of the differencing
    // roundoff that grows at high orders as the radii shrink. Cusp rates
    // approach their exponents only at 1/log(1/r) speed; their window
    // sits much deeper, where the fitted log exponent stabilizes and the
    // polynomial-in-L signal keeps the differencing safe.
    let radii: Vec<f64> = if alpha == 1.0 {
        (12..=44).map(|k| 2.0f64.powi(-k)).collect()
    } else {
        (6..=18).map(|k| 2.0f64.powi(-k)).collect()
    };
    check_remainder_rates_at(rem, alpha, n, &radii)
}

/// [`check_remainder_rates`] on a caller-chosen radius ladder.
pub fn check_remainder_rates_at<F>(
    rem: F,
    alpha: f64,
    n: u32,
    radii: &[f64],
) -> Result<RateReport, AsymptoticsError>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    if !(1..=5).contains(&n) {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "total derivative order must be 1..=5, got {n}"
        )));
    }
    if !alpha.is_finite() || alpha > 1.0 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "order must be finite and <= 1, got {alpha}"
        )));
    }
    validate_radii(radii, 5)?;
    let cusp = alpha == 1.0;

    let mut patterns = Vec::new();
    for total in 1..=n {
        for n1 in 0..=total {
            patterns.push((n1, total - n1));
        }
    }

    let results: Vec<Result<RateCheck, AsymptoticsError>> = par_map(&patterns, |&(n1, n2)| {
        let mut samples = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut acc = 0.0;
            for k in 0..DERIV_THETA_SAMPLES {
                let t = k as f64 / DERIV_THETA_SAMPLES as f64 * std::f64::consts::TAU;
                let z = ComplexPoint::from_polar(r, t)?;
                let w = wirtinger_deriv(&rem, n2, n1, z, None)?;
                acc += w.value.norm();
            }
            samples.push((r, acc / DERIV_THETA_SAMPLES as f64));
        }
        let m = (n1 + n2) as f64;
        let (predicted_p, predicted_q, fit) = if cusp {
            let pq = if n1 == 0 || n2 == 0 { -2.0 } else { -3.0 };
            (-m, pq, fit_in_log_coords(&samples, true)?)
        } else {
            let pp = if n1 + n2 == 1 {
                if alpha > 0.5 {
                    1.0 - 2.0 * alpha
                } else {
                    0.0
                }
            } else {
                2.0 - 2.0 * alpha - m
            };
            (pp, 0.0, fit_in_log_coords(&samples, false)?)
        };
        Ok(RateCheck {
            n1,
            n2,
            predicted_p,
            predicted_q,
            fit,
        })
    });

    let mut checks = Vec::with_capacity(results.len());
    for r in results {
        checks.push(r?);
    }
    Ok(RateReport { alpha, checks })
}

// ---------------------------------------------------------------------
// Boundary limits
// ---------------------------------------------------------------------

/// Extrapolate `|z−p|·log(1/|z−p|)·λ(z)` toward the puncture `p`.
///
/// The limit is `1/√(−κ(p))` for a cusp and 0 for a corner.
pub fn minda_limit(
    field: &MetricField,
    p: ComplexPoint,
) -> Result<LimitEstimate, AsymptoticsError> {
    let radii = domain_ladder(field, 4, 18, 6)?;
    minda_limit_at(field, p, &radii)
}

/// [`minda_limit`] on a caller-chosen radius ladder.
pub fn minda_limit_at(
    field: &MetricField,
    p: ComplexPoint,
    radii: &[f64],
) -> Result<LimitEstimate, AsymptoticsError> {
    validate_radii(radii, 4)?;
    let pc = p.as_complex();
    let rows: Vec<Result<f64, MetricsError>> = par_map(radii, |&r| {
        let l = -r.ln();
        let mut acc = 0.0;
        for k in 0..LIMIT_THETA_SAMPLES {
            let t = k as f64 / LIMIT_THETA_SAMPLES as f64 * std::f64::consts::TAU;
            let z = pc + Complex64::from_polar(r, t);
            acc += field.eval_c(z)?;
        }
        Ok(r * l * acc / LIMIT_THETA_SAMPLES as f64)
    });
    let mut seq = Vec::with_capacity(radii.len());
    for row in rows {
        seq.push(row?);
    }
    let est = limit_from(&inv_l(radii), &seq);
    if est.extrapolation_error > 1e-2 {
        return Err(AsymptoticsError::NonConvergence {
            estimate: est.value,
            spread: est.extrapolation_error,
        });
    }
    Ok(est)
}

/// The three weighted derivative limits of a cusp density, with the values
/// the curvature at the puncture predicts for them.
#[derive(Debug, Clone, Copy)]
pub struct CuspDerivativeLimits {
    /// `(z−p)|z−p|log(1/|z−p|)·λ_z → −1/(2√(−κ₀))`.
    pub first: LimitEstimate,
    /// `(z−p)²|z−p|log(1/|z−p|)·λ_zz → 3/(4√(−κ₀))`.
    pub second: LimitEstimate,
    /// `|z−p|³log(1/|z−p|)·λ_{zz̄} → 1/(4√(−κ₀))`.
    pub mixed: LimitEstimate,
    pub expected_first: f64,
    pub expected_second: f64,
    pub expected_mixed: f64,
}

/// Extrapolate the three weighted λ-derivative limits of a cusp metric.
pub fn cusp_derivative_limits(
    field: &MetricField,
    kappa0: f64,
) -> Result<CuspDerivativeLimits, AsymptoticsError> {
    if !kappa0.is_finite() || kappa0 >= 0.0 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "curvature at the puncture must be negative, got {kappa0}"
        )));
    }
    let radii = domain_ladder(field, 4, 10, 5)?;
    let center = field.domain().center().as_complex();
    let lam = |z: Complex64| field.eval_raw(z);

    let probe = |n_d: u32, n_dbar: u32, weight: &(dyn Fn(Complex64, f64, f64) -> Complex64 + Sync)| -> Result<Vec<f64>, AsymptoticsError> {
        let rows: Vec<Result<f64, AsymptoticsError>> = par_map(&radii, |&r| {
            let l = -r.ln();
            let mut acc = 0.0;
            for k in 0..DERIV_THETA_SAMPLES {
                let t = k as f64 / DERIV_THETA_SAMPLES as f64 * std::f64::consts::TAU;
                let zc = center + Complex64::from_polar(r, t);
                let z = ComplexPoint::from_polar(r, t)?;
                let w = wirtinger_deriv(&lam, n_d, n_dbar, z, None)?;
                acc += (weight(zc - center, r, l) * w.value).re;
            }
            Ok(acc / DERIV_THETA_SAMPLES as f64)
        });
        let mut seq = Vec::with_capacity(radii.len());
        for row in rows {
            seq.push(row?);
        }
        Ok(seq)
    };

    let xs = inv_l(&radii);
    let s1 = probe(1, 0, &|z, r, l| z * r * l)?;
    let s2 = probe(2, 0, &|z, r, l| z * z * r * l)?;
    let s3 = probe(1, 1, &|_, r, l| Complex64::new(r * r * r * l, 0.0))?;
    let root = (-kappa0).sqrt();
    Ok(CuspDerivativeLimits {
        first: limit_from(&xs, &s1),
        second: limit_from(&xs, &s2),
        mixed: limit_from(&xs, &s3),
        expected_first: -1.0 / (2.0 * root),
        expected_second: 3.0 / (4.0 * root),
        expected_mixed: 1.0 / (4.0 * root),
    })
}

/// A weighted derivative limit of `u = log λ` with references for the
/// comparison theory.
#[derive(Debug, Clone)]
pub struct UDerivLimit {
    /// Pure pattern: limit of `zⁿ∂ⁿu`; mixed: limit of `z̄^{n1}z^{n2}∂̄^{n1}∂^{n2}u`.
    pub estimate: LimitEstimate,
    /// `(α/2)(−1)ⁿ(n−1)!` for pure patterns, 0 for mixed ones.
    pub expected: f64,
    /// For cusps only: the mixed limit rescaled by `(log(1/|z|))²`.
    pub rescaled_mixed: Option<LimitEstimate>,
    /// Magnitude reference `(n1−1)!(n2−1)!/4` for the rescaled limit; the
    /// sign is reported via `rescaled_mixed`, not asserted.
    pub rescaled_reference: Option<f64>,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Extrapolate the weighted derivative limits of `u = log λ` near an
/// order-α singularity at the origin.
pub fn u_deriv_limits<F>(
    u: F,
    alpha: f64,
    n1: u32,
    n2: u32,
) -> Result<UDerivLimit, AsymptoticsError>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let total = n1 + n2;
    if !(1..=5).contains(&total) {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "total derivative order must be 1..=5, got {total}"
        )));
    }
    if !alpha.is_finite() || alpha > 1.0 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "order must be finite and <= 1, got {alpha}"
        )));
    }
    let radii: Vec<f64> = (4..=12).map(|k| (-(k as f64)).exp()).collect();
    let mixed = n1 >= 1 && n2 >= 1;
    let cusp_rescale = mixed && alpha == 1.0;

    let rows: Vec<Result<(f64, f64), AsymptoticsError>> = par_map(&radii, |&r| {
        let l = -r.ln();
        let mut plain = 0.0;
        let mut rescaled = 0.0;
        for k in 0..DERIV_THETA_SAMPLES {
            let t = k as f64 / DERIV_THETA_SAMPLES as f64 * std::f64::consts::TAU;
            let z = ComplexPoint::from_polar(r, t)?;
            let zc = z.as_complex();
            let w = wirtinger_deriv(&u, n2, n1, z, None)?;
            let weighted = (zc.conj().powu(n1) * zc.powu(n2) * w.value).re;
            plain += weighted;
            rescaled += weighted * l * l;
        }
        Ok((
            plain / DERIV_THETA_SAMPLES as f64,
            rescaled / DERIV_THETA_SAMPLES as f64,
        ))
    });
    let mut plain = Vec::with_capacity(radii.len());
    let mut resc = Vec::with_capacity(radii.len());
    for row in rows {
        let (a, b) = row?;
        plain.push(a);
        resc.push(b);
    }
    let xs = inv_l(&radii);
    let expected = if mixed {
        0.0
    } else {
        let sign = if total % 2 == 0 { 1.0 } else { -1.0 };
        alpha / 2.0 * sign * factorial(total - 1)
    };
    Ok(UDerivLimit {
        estimate: limit_from(&xs, &plain),
        expected,
        rescaled_mixed: cusp_rescale.then(|| limit_from(&xs, &resc)),
        rescaled_reference: cusp_rescale
            .then(|| factorial(n1 - 1) * factorial(n2 - 1) / 4.0),
    })
}

// ---------------------------------------------------------------------
// Limit tables
// ---------------------------------------------------------------------

/// Singularity regime of an [`l_table`] computation.
#[derive(Debug, Clone, Copy)]
pub enum LTableMode {
    /// Cusp with curvature `kappa0 < 0` at the puncture; weight `|z|·log(1/|z|)`.
    Cusp { kappa0: f64 },
    /// Corner of order `alpha < 1`; weight `|z|^α`. `l_prime` is the
    /// limsup of `|z|^α λ`, measured via [`sk_limsup`] when absent.
    Corner { alpha: f64, l_prime: Option<f64> },
}

/// One entry of a limit table.
#[derive(Debug, Clone, Copy)]
pub struct LTableEntry {
    pub n1: u32,
    pub n2: u32,
    pub numeric: LimitEstimate,
    pub closed_form: f64,
}

/// Numeric and closed-form weighted derivative limits `l_{n1,n2}` for all
/// patterns with `n1 + n2 ≤ n`.
#[derive(Debug, Clone)]
pub struct LimitTable {
    entries: Vec<LTableEntry>,
}

impl LimitTable {
    pub fn entries(&self) -> &[LTableEntry] {
        &self.entries
    }

    pub fn get(&self, n1: u32, n2: u32) -> Option<&LTableEntry> {
        self.entries.iter().find(|e| e.n1 == n1 && e.n2 == n2)
    }

    /// Whether every numeric pair `(n1,n2)/(n2,n1)` agrees within the sum
    /// of the two error bars plus `floor`.
    pub fn symmetric_within(&self, floor: f64) -> bool {
        for a in &self.entries {
            if let Some(b) = self.get(a.n2, a.n1) {
                let allowed =
                    a.numeric.extrapolation_error + b.numeric.extrapolation_error + floor;
                if (a.numeric.value - b.numeric.value).abs() > allowed {
                    return false;
                }
            }
        }
        true
    }
}

/// Generalized binomial coefficient `x(x−1)…(x−k+1)/k!`.
pub fn general_binomial(x: f64, k: u32) -> f64 {
    let mut num = 1.0;
    for i in 0..k {
        num *= x - i as f64;
    }
    num / factorial(k)
}

/// Weighted derivative limit table of a singular density.
///
/// Entry `(n1, n2)` is `(1/(n1!n2!)) · lim weight(z) · z̄^{n1}z^{n2} ·
/// ∂̄^{n1}∂^{n2}λ`, extrapolated along a radius ladder; the closed-form
/// column is `binom(−1/2,n1)·binom(−1/2,n2)/√(−κ₀)` for cusps and
/// `binom(−α/2,n1)·binom(−α/2,n2)·l′` for corners.
pub fn l_table(
    field: &MetricField,
    mode: LTableMode,
    n: u32,
) -> Result<LimitTable, AsymptoticsError> {
    if n > 4 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "table order must be <= 4, got {n}"
        )));
    }
    let center = field.domain().center().as_complex();
    let lam = |z: Complex64| field.eval_raw(z);

    // Ladder and extrapolation abscissae per regime: cusp entries are
    // polynomial in 1/L; corner entries converge in x = r^{2(1−α)}.
    let (radii, xs, weight_exp_l, weight_pow, l_ref, half_coeff) = match mode {
        LTableMode::Cusp { kappa0 } => {
            if !kappa0.is_finite() || kappa0 >= 0.0 {
                return Err(AsymptoticsError::InvalidParameter(format!(
                    "cusp curvature must be negative, got {kappa0}"
                )));
            }
            let radii = domain_ladder(field, 4, 10, 5)?;
            let xs = inv_l(&radii);
            (radii, xs, true, 1.0, 1.0 / (-kappa0).sqrt(), -0.5)
        }
        LTableMode::Corner { alpha, l_prime } => {
            if !alpha.is_finite() || alpha >= 1.0 {
                return Err(AsymptoticsError::InvalidParameter(format!(
                    "corner order must be < 1, got {alpha}"
                )));
            }
            let mut radii = Vec::new();
            for k in 3..=12 {
                let r = 2.0f64.powi(-k);
                if r < 0.9 * field.domain().outer_radius()
                    && r > 1.2 * field.domain().inner_exclusion()
                {
                    radii.push(r);
                }
            }
            if radii.len() < 5 {
                return Err(AsymptoticsError::InvalidParameter(
                    "domain too thin for the corner radius ladder".into(),
                ));
            }
            let b = 1.0 - alpha;
            let xs: Vec<f64> = radii.iter().map(|r| r.powf(2.0 * b)).collect();
            let lp = match l_prime {
                Some(v) => {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(AsymptoticsError::InvalidParameter(format!(
                            "l' must be finite and positive, got {v}"
                        )));
                    }
                    v
                }
                None => sk_limsup(field, alpha, &domain_ladder(field, 4, 14, 6)?)?,
            };
            (radii, xs, false, alpha, lp, -alpha / 2.0)
        }
    };

    let mut patterns = Vec::new();
    for total in 0..=n {
        for n1 in 0..=total {
            patterns.push((n1, total - n1));
        }
    }

    let rows: Vec<Result<LTableEntry, AsymptoticsError>> = par_map(&patterns, |&(n1, n2)| {
        let mut seq = Vec::with_capacity(radii.len());
        for &r in &radii {
            let weight = if weight_exp_l {
                r * (-r.ln())
            } else {
                r.powf(weight_pow)
            };
            let mut acc = 0.0;
            for k in 0..DERIV_THETA_SAMPLES {
                let t = k as f64 / DERIV_THETA_SAMPLES as f64 * std::f64::consts::TAU;
                let zc = center + Complex64::from_polar(r, t);
                let z = ComplexPoint::from_complex(zc)?;
                let w = wirtinger_deriv(&lam, n2, n1, z, None)?;
                let local = zc - center;
                acc += (local.conj().powu(n1) * local.powu(n2) * w.value).re;
            }
            seq.push(weight * acc / DERIV_THETA_SAMPLES as f64 / (factorial(n1) * factorial(n2)));
        }
        let numeric = limit_from(&xs, &seq);
        let closed_form =
            general_binomial(half_coeff, n1) * general_binomial(half_coeff, n2) * l_ref;
        Ok(LTableEntry {
            n1,
            n2,
            numeric,
            closed_form,
        })
    });

    let mut entries = Vec::with_capacity(rows.len());
    for row in rows {
        entries.push(row?);
    }
    Ok(LimitTable { entries })
}

/// Numeric limsup of `|z|^α λ(z)`: per-radius maximum over an angle sweep,
/// extrapolated along the shrinking ladder.
pub fn sk_limsup(
    field: &MetricField,
    alpha: f64,
    radii: &[f64],
) -> Result<f64, AsymptoticsError> {
    if !alpha.is_finite() || alpha >= 1.0 {
        return Err(AsymptoticsError::InvalidParameter(format!(
            "corner order must be < 1, got {alpha}"
        )));
    }
    validate_radii(radii, 4)?;
    let center = field.domain().center().as_complex();
    let rows: Vec<Result<f64, MetricsError>> = par_map(radii, |&r| {
        let mut m = f64::NEG_INFINITY;
        for k in 0..ORDER_THETA_SAMPLES {
            let t = k as f64 / ORDER_THETA_SAMPLES as f64 * std::f64::consts::TAU;
            let z = center + Complex64::from_polar(r, t);
            m = m.max(field.eval_c(z)?);
        }
        Ok(r.powf(alpha) * m)
    });
    let mut seq = Vec::with_capacity(radii.len());
    for row in rows {
        seq.push(row?);
    }
    // A growing envelope means α undershoots the real order; no finite
    // limsup to report.
    let tail = &seq[seq.len().saturating_sub(4)..];
    if tail.windows(2).all(|w| w[1] > w[0]) && *tail.last().unwrap() > 2.0 * tail[0] {
        return Err(AsymptoticsError::Divergence {
            first: seq[0],
            last: *seq.last().unwrap(),
        });
    }
    let (value, _) = auto_limit(&inv_l(radii), &seq);
    Ok(value)
}
