use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Machine-readable record of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub result: ResultBlock,
    pub provenance: Provenance,
    pub verdict: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// Command-specific values such as margins, classical sides or golden diffs.
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: String,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
}

impl Provenance {
    pub fn new(method: impl Into<String>, residual: f64) -> Self {
        Self {
            method: method.into(),
            residual: finite_or_zero(residual),
            grid: None,
            seed: None,
            elapsed_ms: 0.0,
        }
    }
}

/// JSON has no NaN or infinity.
pub fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// `v` as a JSON number, or `null` when it is not finite.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Six significant digits, trailing zeros trimmed.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // rounding can carry into a new digit, e.g. 9.999996 -> 10.00000
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.5e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}e{e}")
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => sig6(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render_value).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(map) => {
            let parts: Vec<String> = map
                .iter()
                .map(|(k, v)| format!("{k}={}", render_value(v)))
                .collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering, floats at six significant digits.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![("command".into(), self.command.clone())];
        if let Some(id) = self.inputs.get("id") {
            rows.push(("example".into(), render_value(id)));
        }
        let r = &self.result;
        let mut line = |k: &str, v: String| rows.push((k.to_string(), v));
        if let Some(v) = r.integral {
            line("integral", sig6(v));
        }
        if let Some(v) = r.beta {
            line("beta", sig6(v));
        }
        if let Some(v) = r.bound {
            line("bound", sig6(v));
        }
        if let Some(c) = &r.case {
            line("case", c.clone());
        }
        if let Some(h) = r.holds {
            line("holds", h.to_string());
        }
        if let Some(w) = &r.witness {
            line("witness", render_value(w));
        }
        for (k, v) in &r.extra {
            match v {
                Value::Array(items) if items.iter().all(Value::is_object) => {
                    line(k, String::new());
                    for item in items {
                        line("", format!("  {}", render_value(item)));
                    }
                }
                _ => line(k, render_value(v)),
            }
        }
        let p = &self.provenance;
        let mut prov = format!("{} (residual {})", p.method, sig6(p.residual));
        if let Some(g) = p.grid {
            let _ = write!(prov, " grid {g}");
        }
        if let Some(s) = p.seed {
            let _ = write!(prov, " seed {s}");
        }
        let _ = write!(prov, " {} ms", sig6(p.elapsed_ms));
        line("method", prov);
        line("verdict", self.verdict.clone());

        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{}", format!("{k:<width$} {v}").trim_end());
        }
        out
    }
}
