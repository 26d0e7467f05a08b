//! `metric-eval`: tabulate a density and its measured curvature on a polar
//! sample plan.
//!
//! Output is CSV with columns re, im, density, numeric_curvature, one row
//! per point, radius-major then angle. A point where evaluation fails keeps
//! its row: the density cell carries the error text and the curvature cell
//! is left empty, so downstream tooling sees exactly which samples died.

use std::path::Path;

use puncta::metrics::{numeric_curvature, ComplexPoint};

use crate::config::MetricEvalConfig;
use crate::fields::build_metric;
use crate::records::{csv_field, emit};
use crate::CliError;

pub fn run(cfg: &MetricEvalConfig, out_dir: Option<&Path>) -> Result<(), CliError> {
    if cfg.radii.is_empty() || cfg.n_angles == 0 {
        return Err(CliError::Config(
            "metric-eval needs a non-empty radii list and n_angles >= 1".into(),
        ));
    }
    for &r in &cfg.radii {
        if !r.is_finite() || r <= 0.0 {
            return Err(CliError::Config(format!(
                "metric-eval radii must be finite and positive, got {r}"
            )));
        }
    }
    let metric = build_metric(&cfg.metric)?;

    let mut csv = String::from("re,im,density,numeric_curvature\r\n");
    let mut any_error = false;
    for &r in &cfg.radii {
        for k in 0..cfg.n_angles {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (cfg.n_angles as f64);
            let (re, im) = (r * theta.cos(), r * theta.sin());
            let z = match ComplexPoint::new(re, im) {
                Ok(z) => z,
                Err(e) => {
                    any_error = true;
                    push_row(&mut csv, re, im, &format!("error: {e}"), None);
                    continue;
                }
            };
            match metric.eval(z) {
                Ok(density) => {
                    match numeric_curvature(&metric, z, cfg.curvature_step) {
                        Ok(kappa) => push_row(&mut csv, re, im, &fmt(density), Some(&fmt(kappa))),
                        Err(e) => {
                            any_error = true;
                            push_row(&mut csv, re, im, &format!("error: {e}"), None);
                        }
                    }
                }
                Err(e) => {
                    any_error = true;
                    push_row(&mut csv, re, im, &format!("error: {e}"), None);
                }
            }
        }
    }

    emit(&csv, out_dir, "metric_eval.csv").map_err(CliError::Io)?;
    if any_error {
        Err(CliError::Config(
            "one or more sample points could not be evaluated; see the density column".into(),
        ))
    } else {
        Ok(())
    }
}

fn fmt(v: f64) -> String {
    let mut buf = ryu_like(v);
    if buf == "-0" {
        buf = "0".into();
    }
    buf
}

/// Shortest round-trip formatting via serde_json keeps the table stable
/// across runs and platforms.
fn ryu_like(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "error: non-finite".into())
}

fn push_row(csv: &mut String, re: f64, im: f64, density: &str, curvature: Option<&str>) {
    csv.push_str(&csv_field(&fmt(re)));
    csv.push(',');
    csv.push_str(&csv_field(&fmt(im)));
    csv.push(',');
    csv.push_str(&csv_field(density));
    csv.push(',');
    if let Some(c) = curvature {
        csv.push_str(&csv_field(c));
    }
    csv.push_str("\r\n");
}
