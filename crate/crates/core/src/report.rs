//! Diagnostic reports returned by the validators.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    /// Records a check; it passes iff `failures` is empty.
    pub fn check(&mut self, name: impl Into<String>, failures: Vec<String>) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed: failures.is_empty(),
            failures,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn outcome(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures_of(&self, name: &str) -> &[String] {
        self.outcome(name).map(|c| c.failures.as_slice()).unwrap_or(&[])
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.passed() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(f, "  [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.name)?;
            for msg in &c.failures {
                writeln!(f, "      - {msg}")?;
            }
        }
        Ok(())
    }
}
