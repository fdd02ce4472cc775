//! `pcurv`: runs validation, p-curvature, Hitchin and descent pipelines on
//! JSON scenario files.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

use std::path::PathBuf;
use std::time::Instant;

use clap::{CommandFactory, Parser};
use rayon::prelude::*;

pub use commands::{Command, CommandRegistry};
pub use error::CliError;
pub use report::{render, Format, Report, Settings, Verdict};
pub use scenario::{Built, Scenario};

#[derive(Debug, Parser)]
#[command(
    name = "pcurv",
    version,
    about = "Restricted Lie algebroids, p-curvature and Frobenius descent over F_p"
)]
pub struct Cli {
    /// validate | pcurvature | hitchin | descend | rees | identities
    pub command: Option<String>,
    /// Scenario files (JSON).
    pub files: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random samples per panel check.
    #[arg(long, default_value_t = 8)]
    pub trials: usize,
    /// Maximal total degree of panel functions.
    #[arg(long = "degree-panel", default_value_t = 3)]
    pub degree_panel: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// With `identities`: a tangent chart `P:N` to test in place of a file.
    #[arg(long, value_name = "P:N")]
    pub chart: Vec<String>,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn usage(registry: &CommandRegistry) -> String {
    let mut help = Cli::command().render_help().to_string();
    help.push_str("\nCommands:\n");
    for c in registry.iter() {
        help.push_str(&format!("  {:<12} {}\n", c.name(), c.about()));
    }
    help
}

/// A tangent-algebroid scenario on `n` coordinates, parsed from `P:N`.
pub fn chart_scenario(spec: &str) -> Result<Scenario, CliError> {
    let bad = || CliError::Schema(format!("--chart expects P:N, got `{spec}`"));
    let (p, n) = spec.split_once(':').ok_or_else(bad)?;
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let json = serde_json::json!({
        "schema_version": scenario::SCHEMA_VERSION,
        "name": format!("tangent-p{p}-n{n}"),
        "p": p,
        "coordinates": pcurv_core::identities::chart_names(n),
        "algebroid": {"preset": "tangent"},
    });
    Scenario::from_json(&json.to_string())
}

pub fn run_scenario(
    command: &dyn Command,
    scenario: Scenario,
    settings: &Settings,
) -> Result<Report, CliError> {
    let t = Instant::now();
    let built = scenario.build()?;
    let mut report = command.run(&built, settings)?;
    report.elapsed = t.elapsed();
    Ok(report)
}

pub fn execute(cli: &Cli) -> Outcome {
    let registry = CommandRegistry::standard();
    let mut out = Outcome::default();
    let Some(name) = cli.command.as_deref() else {
        out.stderr = usage(&registry);
        out.code = 2;
        return out;
    };
    let Some(command) = registry.get(name) else {
        out.stderr = format!(
            "{}\n\n{}",
            CliError::UnknownCommand(name.into()),
            usage(&registry)
        );
        out.code = 2;
        return out;
    };
    if cli.files.is_empty() && cli.chart.is_empty() {
        out.stderr = usage(&registry);
        out.code = 2;
        return out;
    }
    if !cli.chart.is_empty() && name != "identities" {
        out.stderr = "--chart is only accepted by `identities`\n".into();
        out.code = 2;
        return out;
    }
    let settings = Settings {
        seed: cli.seed,
        trials: cli.trials,
        degree_panel: cli.degree_panel,
    };
    let mut jobs: Vec<(String, Result<Scenario, CliError>)> = cli
        .files
        .iter()
        .map(|f| (f.display().to_string(), Scenario::load(f)))
        .collect();
    jobs.extend(
        cli.chart
            .iter()
            .map(|c| (format!("--chart {c}"), chart_scenario(c))),
    );
    let results: Vec<(String, Result<Report, CliError>)> = jobs
        .into_par_iter()
        .map(|(src, sc)| (src, sc.and_then(|sc| run_scenario(command, sc, &settings))))
        .collect();
    let mut reports = Vec::new();
    for (src, r) in results {
        match r {
            Ok(rep) => {
                out.code = out.code.max(rep.exit_code());
                reports.push(rep);
            }
            Err(e) => {
                out.stderr.push_str(&format!("error: {src}: {e}\n"));
                out.code = 2;
            }
        }
    }
    reports.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    for r in &reports {
        for w in &r.warnings {
            out.stderr
                .push_str(&format!("warning: {}: {w}\n", r.scenario));
        }
    }
    if !reports.is_empty() {
        out.stdout = render(&reports, cli.format);
    }
    out
}
