//! Run reports shared by the command-line front end and the C interface.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::PlateauError;

/// Digest of one input document.
#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
    /// The document was generated from the corpus rather than read.
    pub generated: bool,
}

impl InputDigest {
    pub fn of(path: &str, text: &str, generated: bool) -> Self {
        InputDigest { path: path.to_string(), sha256: sha256_hex(text.as_bytes()), bytes: text.len(), generated }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// A tolerance as used in a run, with its compiled-in default.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ToleranceEntry {
    pub value: f64,
    pub default: f64,
    pub overridden: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Holds,
}

/// One pass/fail decision and the number behind it.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub module: String,
    pub value: f64,
    pub relation: Relation,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub structural: bool,
}

impl From<&PlateauError> for ErrorReport {
    fn from(e: &PlateauError) -> Self {
        let dbg = format!("{e:?}");
        let kind = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        ErrorReport { kind, message: e.to_string(), structural: e.is_structural() }
    }
}

/// Results of one module, kept in the order they were produced.
#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub module: String,
    pub data: serde_json::Value,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub tolerances: BTreeMap<String, ToleranceEntry>,
    pub results: Vec<Section>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    /// Wall-clock seconds per phase; printed in human mode only so that
    /// machine output is reproducible byte for byte.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport { command: command.into(), ..Default::default() }
    }

    pub fn section(&mut self, module: &str, data: impl Serialize) {
        let data = serde_json::to_value(data).unwrap_or_else(|e| serde_json::Value::String(e.to_string()));
        self.results.push(Section { module: module.to_string(), data });
    }

    /// Pass iff `value <= tol`. NaN never passes.
    pub fn at_most(&mut self, name: &str, module: &str, value: f64, tol: f64) -> bool {
        self.push(name, module, value, Relation::AtMost, tol, value <= tol)
    }

    /// Pass iff `value >= tol`.
    pub fn at_least(&mut self, name: &str, module: &str, value: f64, tol: f64) -> bool {
        self.push(name, module, value, Relation::AtLeast, tol, value >= tol)
    }

    /// A boolean outcome computed elsewhere against the given tolerance.
    pub fn holds(&mut self, name: &str, module: &str, value: f64, tol: f64, pass: bool) -> bool {
        self.push(name, module, value, Relation::Holds, tol, pass)
    }

    fn push(&mut self, name: &str, module: &str, value: f64, relation: Relation, tol: f64, pass: bool) -> bool {
        self.verdicts.push(Verdict { name: name.into(), module: module.into(), value, relation, tol, pass });
        pass
    }

    pub fn fail(&mut self, e: &PlateauError) {
        self.error = Some(ErrorReport::from(e));
    }

    pub fn all_pass(&self) -> bool {
        self.error.is_none() && self.verdicts.iter().all(|v| v.pass)
    }

    /// 0 when everything passed, 2 for malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) if e.structural => 2,
            Some(_) => 1,
            None if self.verdicts.iter().all(|v| v.pass) => 0,
            None => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "plateau {}", self.command);
        for i in &self.inputs {
            let origin = if i.generated { " (generated)" } else { "" };
            let _ = writeln!(out, "  input {}{}  sha256 {}  {} bytes", i.path, origin, i.sha256, i.bytes);
        }
        if !self.tolerances.is_empty() {
            let _ = writeln!(out, "tolerances");
            for (k, t) in &self.tolerances {
                let mark = if t.overridden { format!("  (default {:e})", t.default) } else { String::new() };
                let _ = writeln!(out, "  {k:<16} {:e}{mark}", t.value);
            }
        }
        for s in &self.results {
            let _ = writeln!(out, "[{}]", s.module);
            human_value(&mut out, &s.data, 1);
        }
        if !self.verdicts.is_empty() {
            let _ = writeln!(out, "verdicts");
            for v in &self.verdicts {
                let rel = match v.relation {
                    Relation::AtMost => "<=",
                    Relation::AtLeast => ">=",
                    Relation::Holds => "at tol",
                };
                let _ = writeln!(
                    out,
                    "  {:<4} {:<28} {:>14.6e} {rel} {:e}  ({})",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.name,
                    v.value,
                    v.tol,
                    v.module
                );
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error ({}): {}", e.kind, e.message);
        }
        for (phase, secs) in &self.timings {
            let _ = writeln!(out, "time {phase}: {secs:.3} s");
        }
        out
    }
}

fn scalar(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::Null => Some("-".into()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        serde_json::Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        }),
        serde_json::Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn human_value(out: &mut String, v: &serde_json::Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                match x {
                    serde_json::Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
                        let shown: Vec<String> = items.iter().take(12).filter_map(scalar).collect();
                        let more = if items.len() > 12 { format!(" … ({} total)", items.len()) } else { String::new() };
                        let _ = writeln!(out, "{pad}{k}: [{}]{more}", shown.join(", "));
                    }
                    _ => match scalar(x) {
                        Some(s) => {
                            let _ = writeln!(out, "{pad}{k}: {s}");
                        }
                        None => {
                            let _ = writeln!(out, "{pad}{k}:");
                            human_value(out, x, depth + 1);
                        }
                    },
                }
            }
        }
        serde_json::Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}- #{i}");
                        human_value(out, x, depth + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}
