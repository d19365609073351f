//! Check reports shared by every verification routine and the suite runner.

use serde::Serialize;
use serde_json::Value;

pub const REPORT_SCHEMA: &str = "modvertex-report/1";

/// One coefficient of a vector in a witness, in human-checkable form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermJson {
    pub monomial: String,
    pub coeff: String,
}

/// Minimal counterexample attached to a failed check.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub description: String,
    pub probe: Vec<TermJson>,
    pub lhs: Vec<TermJson>,
    pub rhs: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Value,
    pub passed: bool,
    /// Number of elementary equalities evaluated.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock time, recorded only on request so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, params: Value) -> Self {
        CheckReport {
            name: name.into(),
            params,
            passed: true,
            checked: 0,
            witness: None,
            details: Value::Null,
            notes: Vec::new(),
            elapsed_ms: None,
        }
    }

    /// Records a failure; only the first witness is kept.
    pub fn fail(&mut self, witness: Witness) {
        self.passed = false;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Folds a sub-check into this one.
    pub fn absorb(&mut self, other: &CheckReport) {
        self.checked += other.checked;
        if !other.passed {
            self.passed = false;
            if self.witness.is_none() {
                if let Some(w) = &other.witness {
                    let mut w = w.clone();
                    w.description = format!("{}: {}", other.name, w.description);
                    self.witness = Some(w);
                }
            }
        }
    }
}

/// Top-level report for one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub suite: String,
    pub config: Value,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, config: Value) -> Self {
        SuiteReport {
            schema: REPORT_SCHEMA,
            suite: suite.into(),
            config,
            passed: true,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckReport) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {} ({} checks)\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.checked
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("       witness: {}\n", w.description));
            }
            for n in &c.notes {
                out.push_str(&format!("       note: {n}\n"));
            }
        }
        out.push_str(&format!(
            "suite {}: {}\n",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" }
        ));
        out
    }
}
