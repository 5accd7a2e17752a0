//! Report and error JSON.  All numbers go through serde_json's shortest
//! round-trip float printing, so identical inputs give byte-identical output.

use fluxform_core::{AlternatingTensor, Error};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs: Value,
    pub outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

/// Wall-clock accounting, opt-in via `--timings` (timings vary run to run,
/// so they would break byte-identical reports if always present).
#[derive(Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

pub fn tensor_json(t: &AlternatingTensor) -> Value {
    json!({
        "n": t.n(),
        "degree": t.degree(),
        "components": t.components_map(),
    })
}

/// Machine-readable error payload plus the process exit code for it.
pub fn error_json(e: &Error) -> (Value, i32) {
    let message = e.to_string();
    let (kind, mut extra, code) = match e {
        Error::DegreeOutOfRange { degree, n } => {
            ("degree-out-of-range", json!({"degree": degree, "n": n}), 2)
        }
        Error::IndexOutOfRange { value, n } => {
            ("index-out-of-range", json!({"value": value, "n": n}), 2)
        }
        Error::DimensionMismatch {
            context,
            expected,
            actual,
        } => (
            "dimension-mismatch",
            json!({"context": context, "expected": expected, "actual": actual}),
            2,
        ),
        Error::Sampling { point, reason } => {
            ("sampling", json!({"point": point, "reason": reason}), 3)
        }
        Error::Parse { line, column, .. } => {
            ("parse", json!({"line": line, "column": column}), 2)
        }
        Error::DegreeMismatch { declared, found } => (
            "degree-mismatch",
            json!({"declared": declared, "found": found}),
            2,
        ),
        Error::DegenerateInterval { a, b } => {
            ("degenerate-interval", json!({"a": a, "b": b}), 2)
        }
        Error::AxisOutOfRange { axis, k } => {
            ("axis-out-of-range", json!({"axis": axis, "k": k}), 2)
        }
        Error::Config(_) => ("config", json!({}), 2),
        Error::Unsupported(_) => ("unsupported", json!({}), 2),
        Error::Bracketing { depth, .. } => ("bracketing", json!({"depth": depth}), 4),
        Error::Format { what, .. } => ("format", json!({"what": what}), 2),
    };
    extra["kind"] = json!(kind);
    extra["message"] = json!(message);
    (json!({ "error": extra }), code)
}
