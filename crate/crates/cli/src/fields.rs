//! Metric construction and deterministic point sampling shared by the
//! subcommands.

use num_complex::Complex64;
use puncta::metrics::{
    lambda_alpha_r_density, ComplexPoint, Domain, LambdaAlphaRParams, MetricField,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::MetricSpec;
use crate::CliError;

pub fn build_metric(spec: &MetricSpec) -> Result<MetricField, CliError> {
    match spec {
        MetricSpec::HyperbolicDisk => Ok(MetricField::hyperbolic_disk()),
        MetricSpec::PuncturedDisk => Ok(MetricField::punctured_disk()),
        MetricSpec::LambdaAlphaR { alpha, radius } => {
            let params = LambdaAlphaRParams::new(*alpha, *radius)
                .map_err(|e| CliError::Config(format!("metric parameters: {e}")))?;
            Ok(MetricField::lambda_alpha_r(params))
        }
    }
}

/// `scale * lambda_disk`. Scaling the density by c rescales curvature by
/// 1/c^2, which is what the comparison check probes.
pub fn scaled_disk_metric(scale: f64) -> Result<MetricField, CliError> {
    let domain = Domain::disk(ComplexPoint::zero(), 1.0)
        .map_err(|e| CliError::Config(format!("scaled disk metric: {e}")))?;
    MetricField::from_fn(
        domain,
        Some(0.0),
        Some(-4.0 / (scale * scale)),
        move |z: Complex64| scale / (1.0 - z.norm_sqr()),
    )
    .map_err(|e| CliError::Config(format!("scaled disk metric: {e}")))
}

/// `scale * lambda_{alpha,R}`: the corner density scaled off its extremal
/// value. Curvature rescales to −4/scale².
pub fn scaled_alpha_metric(scale: f64, alpha: f64, radius: f64) -> Result<MetricField, CliError> {
    let params = LambdaAlphaRParams::new(alpha, radius)
        .map_err(|e| CliError::Config(format!("metric parameters: {e}")))?;
    if scale == 1.0 {
        return Ok(MetricField::lambda_alpha_r(params));
    }
    let domain = Domain::punctured(ComplexPoint::zero(), 0.0, radius)
        .map_err(|e| CliError::Config(format!("scaled metric: {e}")))?;
    MetricField::from_fn(
        domain,
        Some(alpha),
        Some(-4.0 / (scale * scale)),
        move |z: Complex64| {
            ComplexPoint::new(z.re, z.im)
                .ok()
                .and_then(|p| lambda_alpha_r_density(&params, p).ok())
                .map(|lam| scale * lam)
                .unwrap_or(f64::NAN)
        },
    )
    .map_err(|e| CliError::Config(format!("scaled metric: {e}")))
}

/// The restriction of lambda_{alpha,R2} to the smaller punctured disk of
/// radius R1, used as the competitor in the maximality comparison.
pub fn restricted_alpha_metric(
    alpha: f64,
    big_r2: f64,
    big_r1: f64,
) -> Result<MetricField, CliError> {
    let params = LambdaAlphaRParams::new(alpha, big_r2)
        .map_err(|e| CliError::Config(format!("metric parameters: {e}")))?;
    let domain = Domain::punctured(ComplexPoint::zero(), 0.0, big_r1)
        .map_err(|e| CliError::Config(format!("restricted metric: {e}")))?;
    MetricField::from_fn(
        domain,
        Some(alpha),
        Some(-4.0),
        move |z: Complex64| {
            ComplexPoint::new(z.re, z.im)
                .ok()
                .and_then(|p| lambda_alpha_r_density(&params, p).ok())
                .unwrap_or(f64::NAN)
        },
    )
    .map_err(|e| CliError::Config(format!("restricted metric: {e}")))
}

/// Deterministic sample of points with log-uniform radius in
/// [r_lo, r_hi] and uniform angle. Log-uniform spacing keeps small radii
/// represented, where singular behavior lives.
pub fn disk_sample(n: usize, r_lo: f64, r_hi: f64, seed: u64) -> Vec<ComplexPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = r_hi / r_lo;
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let r = r_lo * ratio.powf(u);
            let theta = 2.0 * std::f64::consts::PI * v;
            ComplexPoint::new(r * theta.cos(), r * theta.sin())
                .expect("finite radius and angle produce a finite point")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_is_deterministic_and_in_range() {
        let a = disk_sample(50, 1e-3, 0.9, 42);
        let b = disk_sample(50, 1e-3, 0.9, 42);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!((p.re(), p.im()), (q.re(), q.im()));
        }
        for p in &a {
            let r = p.abs();
            assert!(r >= 1e-3 * 0.999 && r <= 0.9 * 1.001, "r = {r}");
        }
        let c = disk_sample(50, 1e-3, 0.9, 43);
        assert!(a.iter().zip(&c).any(|(p, q)| p.re() != q.re()));
    }

    #[test]
    fn scaled_disk_has_rescaled_curvature_hint() {
        let m = scaled_disk_metric(0.8).unwrap();
        let z = ComplexPoint::new(0.3, 0.1).unwrap();
        let expect = 0.8 / (1.0 - 0.1);
        assert!((m.eval(z).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn restricted_metric_keeps_the_larger_density() {
        let m = restricted_alpha_metric(0.5, 1.0, 0.5).unwrap();
        let params = LambdaAlphaRParams::new(0.5, 1.0).unwrap();
        let z = ComplexPoint::new(0.2, 0.0).unwrap();
        let want = lambda_alpha_r_density(&params, z).unwrap();
        assert!((m.eval(z).unwrap() - want).abs() < 1e-14);
        assert!(m.eval(ComplexPoint::new(0.7, 0.0).unwrap()).is_err());
    }
}
