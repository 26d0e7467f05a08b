//! Verdict records and the JSON Lines sink.
//!
//! Every check emits one record per scalar assertion. Serialization goes
//! through `serde_json`, whose shortest round-trip float formatting keeps
//! reruns byte-identical; non-finite measurements never reach the stream —
//! they are reported as status strings in the witness instead.

use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::io::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct VerdictRecord {
    pub check_id: String,
    pub theorem_tag: String,
    pub expected: Vec<f64>,
    pub measured: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl VerdictRecord {
    /// Scalar comparison record: pass iff |measured − expected| ≤ tolerance.
    pub fn scalar(
        check_id: impl Into<String>,
        tag: impl Into<String>,
        expected: f64,
        measured: f64,
        tolerance: f64,
    ) -> Self {
        let pass = measured.is_finite() && (measured - expected).abs() <= tolerance;
        let mut rec = Self {
            check_id: check_id.into(),
            theorem_tag: tag.into(),
            expected: vec![expected],
            measured: vec![],
            tolerance,
            pass,
            witness: None,
        };
        if measured.is_finite() {
            rec.measured.push(measured);
        } else {
            rec.witness = Some(json!({ "status": "measurement was not finite" }));
        }
        rec
    }

    /// Record for a check that could not produce a number at all.
    pub fn failure(
        check_id: impl Into<String>,
        tag: impl Into<String>,
        expected: Vec<f64>,
        tolerance: f64,
        status: String,
    ) -> Self {
        Self {
            check_id: check_id.into(),
            theorem_tag: tag.into(),
            expected,
            measured: vec![],
            tolerance,
            pass: false,
            witness: Some(json!({ "status": status })),
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }
}

/// JSON value for a float that may be non-finite; failures become strings.
pub fn json_real(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(format!("non-finite ({v})"))
    }
}

/// Render records as JSON Lines.
pub fn to_jsonl(records: &[VerdictRecord]) -> String {
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).expect("records contain only finite numbers"));
        buf.push('\n');
    }
    buf
}

/// Write `text` to stdout and, when an output directory is set, to
/// `dir/name` with identical bytes. A reader hanging up early (head, a
/// closed pipe) is not an error.
pub fn emit(text: &str, out_dir: Option<&Path>, name: &str) -> std::io::Result<()> {
    let mut stdout = std::io::stdout().lock();
    let wrote = stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush());
    if let Err(e) = wrote {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e);
        }
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// RFC 4180 field escaping: quote when the cell holds a comma, quote, or
/// line break, doubling interior quotes.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\r') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
