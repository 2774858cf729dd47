use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::input::InputDocument;
use crate::solver::{Flags, Solution};

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRecord {
    pub class: usize,
    pub i: usize,
    pub j: usize,
    /// (Pseudo)inverse entry at `(j, i)`.
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualMap {
    pub entries: Vec<ResidualRecord>,
    pub max_abs: f64,
    pub zero_count: usize,
    pub zero_threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagsRecord {
    pub symmetric: bool,
    pub toeplitz: bool,
    pub positive_definite: bool,
    pub zero_count: usize,
}

impl From<Flags> for FlagsRecord {
    fn from(f: Flags) -> Self {
        Self {
            symmetric: f.symmetric,
            toeplitz: f.toeplitz,
            positive_definite: f.positive_definite,
            zero_count: f.zero_count,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionRecord {
    pub x: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub inverse_or_pinv: Vec<Vec<f64>>,
    pub objective: f64,
    pub grad_norm: f64,
    pub gradient: Vec<f64>,
    pub residual_map: ResidualMap,
    pub flags: FlagsRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    pub iterations: usize,
}

impl SolutionRecord {
    pub fn new(sol: &Solution, entropy: Option<f64>) -> Self {
        let r = &sol.residual;
        Self {
            x: sol.x.clone(),
            sigma: sol.sigma.to_rows(),
            inverse_or_pinv: sol.inv.to_rows(),
            objective: sol.objective,
            grad_norm: sol.grad_norm,
            gradient: sol.gradient.clone(),
            residual_map: ResidualMap {
                entries: r
                    .entries
                    .iter()
                    .map(|e| ResidualRecord {
                        class: e.class + 1,
                        i: e.position.0 + 1,
                        j: e.position.1 + 1,
                        value: e.value,
                    })
                    .collect(),
                max_abs: r.max_abs(),
                zero_count: r.zero_count,
                zero_threshold: r.zero_threshold,
            },
            flags: sol.flags.into(),
            entropy,
            start: sol.provenance.start,
            iterations: sol.provenance.iterations,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckSample {
    pub index: usize,
    pub x: Vec<f64>,
    pub analytic: Vec<f64>,
    pub finite_difference: Vec<f64>,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcludedSample {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckReport {
    pub threshold: f64,
    pub passed: bool,
    pub samples: Vec<GradcheckSample>,
    pub excluded: Vec<ExcludedSample>,
    /// Index into `samples` of the largest relative error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppliedRecord {
    pub side: &'static str,
    pub x: Vec<Vec<f64>>,
    pub exploited_zeros: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    pub starts: usize,
    pub converged: usize,
    pub distinct: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub starts: usize,
    pub seed: u64,
    pub range: f64,
    pub grad_tol: f64,
    pub dedup_tol: f64,
    pub max_iters: usize,
    pub singular_guard: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub warnings: Vec<String>,
    pub failures: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<RunStats>,
    pub config: ConfigEcho,
    pub input: InputDocument,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDocument {
    pub command: &'static str,
    pub solutions: Vec<SolutionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradcheck: Option<GradcheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applied: Option<AppliedRecord>,
    pub diagnostics: Diagnostics,
}

impl OutputDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("output is serializable");
        s.push('\n');
        s
    }

    /// Indented rendering of the same JSON value; numeric matrices are
    /// column aligned. Every number is printed exactly as in the JSON.
    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("output is serializable");
        let mut out = String::new();
        render(&mut out, &value, 0);
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn as_matrix(v: &Value) -> Option<Vec<Vec<String>>> {
    let rows = v.as_array()?;
    if rows.is_empty() {
        return None;
    }
    rows.iter()
        .map(|r| {
            let r = r.as_array()?;
            r.iter().all(is_scalar).then(|| r.iter().map(scalar).collect())
        })
        .collect()
}

fn render(out: &mut String, value: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                if is_scalar(v) {
                    let _ = writeln!(out, "{pad}{key}: {}", scalar(v));
                } else if let Some(list) = v.as_array().filter(|a| a.iter().all(is_scalar)) {
                    let items: Vec<String> = list.iter().map(scalar).collect();
                    let _ = writeln!(out, "{pad}{key}: [{}]", items.join(", "));
                } else if let Some(rows) = as_matrix(v) {
                    let _ = writeln!(out, "{pad}{key}:");
                    render_matrix(out, &rows, indent + 1);
                } else if v.as_object().is_some_and(|m| m.is_empty()) {
                    let _ = writeln!(out, "{pad}{key}: {{}}");
                } else {
                    let _ = writeln!(out, "{pad}{key}:");
                    render(out, v, indent + 1);
                }
            }
        }
        Value::Array(items) => {
            for (n, item) in items.iter().enumerate() {
                if is_scalar(item) {
                    let _ = writeln!(out, "{pad}[{n}] {}", scalar(item));
                } else {
                    let _ = writeln!(out, "{pad}[{n}]");
                    render(out, item, indent + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

fn render_matrix(out: &mut String, rows: &[Vec<String>], indent: usize) {
    let pad = "  ".repeat(indent);
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:>w$}"))
            .collect();
        let _ = writeln!(out, "{pad}{}", cells.join("  ").trim_end());
    }
}
