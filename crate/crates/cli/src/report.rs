//! Command reports and their text and JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use pcurv_core::{CheckResult, Status, ValidationReport};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub trials: usize,
    pub degree_panel: u32,
}

impl Default for Settings {
    fn default() -> Self {
        let d = pcurv_core::PanelConfig::default();
        Self {
            seed: d.seed,
            trials: d.trials,
            degree_panel: d.degree,
        }
    }
}

impl Settings {
    pub fn panel(&self) -> pcurv_core::PanelConfig {
        pcurv_core::PanelConfig {
            seed: self.seed,
            trials: self.trials,
            degree: self.degree_panel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The scenario declared the failure it produced.
    ExpectedFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub p: u64,
    pub settings: Settings,
    pub verdict: Verdict,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub results: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn new(scenario: &str, command: &str, p: u64, settings: Settings) -> Self {
        Self {
            scenario: scenario.to_string(),
            command: command.to_string(),
            p,
            settings,
            verdict: Verdict::Pass,
            checks: Vec::new(),
            results: BTreeMap::new(),
            warnings: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn absorb(&mut self, r: ValidationReport) {
        self.checks.extend(r.checks);
    }

    pub fn check(&mut self, section: &str, name: &str, witness: Option<String>) {
        let mut v = ValidationReport::new();
        v.record(section, name, 0, witness);
        self.absorb(v);
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status.is_failure())
    }

    /// Set the verdict from the checks unless it was already decided.
    pub fn settle(&mut self) {
        if self.has_failures() {
            self.verdict = Verdict::Fail;
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Fail => 1,
            _ => 0,
        }
    }

    pub fn find(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn render(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => {
            let text = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            };
            text.expect("reports serialize") + "\n"
        }
        Format::Text => reports
            .iter()
            .map(render_text)
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::ExpectedFailure => "PASS (expected failure)",
    }
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let failed = r.checks.iter().filter(|c| c.status == Status::Fail).count();
    let _ = writeln!(out, "== {} :: {} (p = {}) ==", r.scenario, r.command, r.p);
    let _ = writeln!(
        out,
        "{}  {} checks, {} failed  [{:.1} ms, seed {}, {} trials, degree {}]",
        verdict_word(r.verdict),
        r.checks.len(),
        failed,
        r.elapsed.as_secs_f64() * 1e3,
        r.settings.seed,
        r.settings.trials,
        r.settings.degree_panel
    );
    let sw = r
        .checks
        .iter()
        .map(|c| c.section.len())
        .max()
        .unwrap_or(0)
        .max(7);
    let nw = r
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0)
        .max(5);
    if !r.checks.is_empty() {
        let _ = writeln!(
            out,
            "  {:<sw$}  {:<nw$}  {:<12}  {:>5}",
            "section", "check", "status", "cases"
        );
    }
    for c in &r.checks {
        let _ = writeln!(
            out,
            "  {:<sw$}  {:<nw$}  {:<12}  {:>5}",
            c.section,
            c.name,
            c.status.to_string(),
            c.panel_size
        );
        if let Some(n) = &c.note {
            let _ = writeln!(out, "      note: {n}");
        }
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "      witness: {w}");
        }
    }
    if !r.results.is_empty() {
        let _ = writeln!(out, "results:");
        for (k, v) in &r.results {
            let _ = writeln!(out, "  {k}: {}", flat_value(v));
        }
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn flat_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!(
            "[{}]",
            a.iter().map(flat_value).collect::<Vec<_>>().join(", ")
        ),
        Value::Object(o) => format!(
            "{{{}}}",
            o.iter()
                .map(|(k, v)| format!("{k}: {}", flat_value(v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        other => other.to_string(),
    }
}
