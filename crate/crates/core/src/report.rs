//! Verification reports.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub theorem: String,
    pub cases: usize,
    pub violations: Vec<Value>,
    pub inconclusive: Vec<Value>,
    /// Suite-specific findings.
    pub details: Map<String, Value>,
}

impl Report {
    pub fn new(theorem: &str) -> Self {
        Report { theorem: theorem.into(), cases: 0, violations: vec![], inconclusive: vec![], details: Map::new() }
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(key.into(), serde_json::to_value(value).expect("report values serialize"));
        self
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {status}", self.theorem);
        let _ = writeln!(out, "  cases: {}", self.cases);
        let _ = writeln!(out, "  violations: {}", self.violations.len());
        let _ = writeln!(out, "  inconclusive: {}", self.inconclusive.len());
        for (k, v) in &self.details {
            let _ = writeln!(out, "  {k}: {}", compact(v));
        }
        for v in &self.violations {
            let _ = writeln!(out, "  violation: {}", compact(v));
        }
        for v in &self.inconclusive {
            let _ = writeln!(out, "  inconclusive: {}", compact(v));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_sorted_and_stable() {
        let r = Report::new("demo").detail("zeta", 1).detail("alpha", "x");
        let text = r.to_json_string();
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        assert_eq!(text, r.clone().to_json_string());
        assert!(r.to_text().starts_with("demo: PASS"));
    }
}
