//! Pass/fail bookkeeping shared by every validator.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Exact identity verified.
    Pass,
    /// Verified on every element of a finite panel.
    PassPanel,
    Fail,
    /// Not applicable for this input (reason in `note`).
    Skipped,
}

impl Status {
    pub fn is_failure(self) -> bool {
        self == Status::Fail
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::PassPanel => "pass (panel)",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Report section, e.g. `algebroid`, `p-structure`, `anchor-restricted compatibility`.
    pub section: String,
    pub status: Status,
    pub panel_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    /// Record a check that ran over `panel_size` cases; `witness` is the first counterexample.
    pub fn record(
        &mut self,
        section: &str,
        name: &str,
        panel_size: usize,
        witness: Option<String>,
    ) {
        let status = match (&witness, panel_size) {
            (Some(_), _) => Status::Fail,
            (None, 0 | 1) => Status::Pass,
            (None, _) => Status::PassPanel,
        };
        self.checks.push(CheckResult {
            name: name.to_string(),
            section: section.to_string(),
            status,
            panel_size,
            witness,
            note: None,
        });
    }

    pub fn skip(&mut self, section: &str, name: &str, note: &str) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            section: section.to_string(),
            status: Status::Skipped,
            panel_size: 0,
            witness: None,
            note: Some(note.to_string()),
        });
    }

    /// Attach a note to the most recent check.
    pub fn annotate(&mut self, note: &str) {
        if let Some(last) = self.checks.last_mut() {
            last.note = Some(note.to_string());
        }
    }

    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(|c| c.status.is_failure())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status.is_failure())
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| !c.status.is_failure())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(
                f,
                "[{}] {} / {}: {}",
                c.status, c.section, c.name, c.panel_size
            )?;
            if let Some(w) = &c.witness {
                write!(f, "  witness: {}", w)?;
            }
            if let Some(n) = &c.note {
                write!(f, "  ({})", n)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
