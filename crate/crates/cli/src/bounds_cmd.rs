//! `bounds`: evaluate the Γ-product constant δ and the induced density
//! limit bound for each configured triple of puncture orders.
//!
//! One JSON line per case, in config order. Orders that violate the
//! constraints are a config mistake; a degenerate evaluation (the bound
//! blowing up at δ = 1) keeps its line with a status string and the run
//! exits through the runtime path.

use std::path::Path;

use serde::Serialize;
use serde_json::json;

use puncta::bounds::{delta_three_puncture, ThreePunctureParams};

use crate::config::BoundsConfig;
use crate::records::emit;
use crate::CliError;

#[derive(Serialize)]
struct BoundsRow {
    alpha: f64,
    beta: f64,
    gamma: f64,
    a: f64,
    b: f64,
    c: f64,
    delta: f64,
    bound: f64,
}

pub fn run(cfg: &BoundsConfig, out_dir: Option<&Path>) -> Result<bool, CliError> {
    if cfg.cases.is_empty() {
        return Err(CliError::Config(
            "bounds needs at least one [[bounds.cases]] entry".into(),
        ));
    }
    let mut lines = String::new();
    let mut first_failure: Option<String> = None;
    for case in &cfg.cases {
        let params = ThreePunctureParams::new(case.alpha, case.beta, case.gamma)
            .map_err(|e| CliError::Config(format!("puncture orders: {e}")))?;
        match delta_three_puncture(&params) {
            Ok(db) => {
                let row = BoundsRow {
                    alpha: params.alpha(),
                    beta: params.beta(),
                    gamma: params.gamma(),
                    a: params.a(),
                    b: params.b(),
                    c: params.c(),
                    delta: db.delta,
                    bound: db.bound,
                };
                lines.push_str(&serde_json::to_string(&row).expect("finite row"));
                lines.push('\n');
            }
            Err(e) => {
                let row = json!({
                    "alpha": case.alpha,
                    "beta": case.beta,
                    "gamma": case.gamma,
                    "status": e.to_string(),
                });
                lines.push_str(&serde_json::to_string(&row).expect("status row"));
                lines.push('\n');
                first_failure.get_or_insert(e.to_string());
            }
        }
    }
    emit(&lines, out_dir, "bounds.jsonl").map_err(CliError::Io)?;
    match first_failure {
        Some(e) => Err(CliError::Runtime(format!("bound evaluation failed: {e}"))),
        None => Ok(true),
    }
}
