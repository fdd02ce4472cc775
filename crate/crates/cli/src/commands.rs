//! Subcommands, looked up by name in a [`CommandRegistry`].

use std::collections::BTreeMap;
use std::sync::Arc;

use pcurv_core::algebroid::{validate_algebroid, validate_p_structure};
use pcurv_core::hitchin::{
    descend_invariants, hitchin_invariants, trace_flatness_check, universal_char_poly,
    DescentReport, HitchinInvariants,
};
use pcurv_core::identities::IdentityRegistry;
use pcurv_core::{Algebroid, Error, LambdaModule, PCurvature, PolyMatrix};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::{Report, Settings, Verdict};
use crate::scenario::{Built, Expectation};

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError>;
}

pub struct CommandRegistry {
    commands: Vec<Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn empty() -> Self {
        Self {
            commands: Vec::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Validate));
        r.register(Box::new(PCurvatureCmd));
        r.register(Box::new(Hitchin));
        r.register(Box::new(Descend));
        r.register(Box::new(Rees));
        r.register(Box::new(Identities));
        r
    }

    pub fn register(&mut self, c: Box<dyn Command>) {
        self.commands.push(c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Command> {
        self.commands.iter().map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.iter().map(|c| c.name()).collect()
    }
}

fn start(built: &Built, command: &str, settings: &Settings) -> Report {
    Report::new(&built.scenario.name, command, built.scenario.p, *settings)
}

fn need_module<'a>(
    built: &'a Built,
    command: &'static str,
) -> Result<&'a Arc<LambdaModule>, CliError> {
    built.module.as_ref().ok_or(CliError::Missing {
        command,
        what: "a module block",
    })
}

fn matrices_json(ms: &[PolyMatrix]) -> Value {
    Value::Array(
        ms.iter()
            .map(|m| {
                Value::Array(
                    m.to_rows()
                        .iter()
                        .map(|r| Value::Array(r.iter().map(|e| json!(e.to_string())).collect()))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Flatness, order-0 assertion and the p-curvature checks.
fn p_curvature_stage(
    module: &Arc<LambdaModule>,
    settings: &Settings,
    report: &mut Report,
) -> Result<Option<PCurvature>, CliError> {
    report.absorb(module.validate_flatness()?);
    if report.has_failures() {
        return Ok(None);
    }
    let c = match module.p_curvature(false) {
        Ok(c) => c,
        Err(Error::HigherOrder { generator, witness }) => {
            report.check(
                "p-curvature",
                "order 0",
                Some(format!("e{}: {witness}", generator + 1)),
            );
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    report.check("p-curvature", "order 0", None);
    report.absorb(c.check_oracle_equivalence()?);
    report.absorb(c.check_p_linearity(&settings.panel())?);
    report.absorb(c.check_higgs_commutativity()?);
    report.absorb(c.check_flat_commutation()?);
    report.result("psi", matrices_json(c.psi()));
    Ok(Some(c))
}

fn invariants_json(inv: &HitchinInvariants) -> Value {
    let mut out = serde_json::Map::new();
    for k in 1..=inv.rank() {
        let parts: serde_json::Map<String, Value> = inv
            .by_y_monomial(k)
            .into_iter()
            .map(|(m, c)| (m, json!(c.to_string())))
            .collect();
        out.insert(format!("e{k}"), Value::Object(parts));
    }
    Value::Object(out)
}

fn hitchin_stage(
    c: &PCurvature,
    report: &mut Report,
) -> Result<Option<HitchinInvariants>, CliError> {
    let cp = match universal_char_poly(c) {
        Ok(cp) => cp,
        Err(Error::NotCommuting(w)) => {
            report.check("hitchin", "characteristic polynomial", Some(w));
            return Ok(None);
        }
        Err(e) => return Err(e.into()),
    };
    report.result("char_poly", cp.to_string());
    let inv = hitchin_invariants(c)?;
    report.result("invariants", invariants_json(&inv));
    if c.module().algebroid().ring().field().is_char_two() {
        report.warn("trace flatness is not checked in characteristic 2");
    } else {
        report.absorb(trace_flatness_check(c)?);
    }
    Ok(Some(inv))
}

fn descent_json(rep: &DescentReport) -> Value {
    serde_json::to_value(rep).expect("descent report serializes")
}

/// Records the descent verdict; returns whether descent failed.
fn descent_stage(
    inv: &HitchinInvariants,
    alg: &Algebroid,
    expect: Option<Expectation>,
    report: &mut Report,
) -> Result<bool, CliError> {
    let rep = descend_invariants(inv, alg)?;
    report.result("descent", descent_json(&rep));
    let consistent = rep.is_consistent()?;
    report.check(
        "descent",
        "pullback consistency",
        (!consistent).then(|| "a descended coefficient does not pull back to its original".into()),
    );
    let witness = rep.failures().next().map(|e| {
        let w = match &e.outcome {
            pcurv_core::hitchin::DescentOutcome::NotDescendable { witness, monomials } => {
                format!("monomials [{}] in {witness}", monomials.join(", "))
            }
            _ => String::new(),
        };
        format!(
            "e{} coefficient of {}: {} has {w}",
            e.k, e.y_monomial, e.coefficient
        )
    });
    let failed = witness.is_some();
    match (failed, expect, rep.generically_surjective) {
        (false, Some(Expectation::NotDescendable), _) => {
            report.check(
                "descent",
                "hitchin descent",
                Some(
                    "every coefficient descended although the scenario expects non-descent".into(),
                ),
            );
        }
        (false, None, _) => report.check("descent", "hitchin descent", None),
        (true, Some(Expectation::NotDescendable), _) => {
            report.check("descent", "hitchin descent", None);
            if let Some(last) = report.checks.last_mut() {
                last.note = Some(format!(
                    "expected non-descent: {}",
                    witness.unwrap_or_default()
                ));
            }
        }
        (true, None, true) => report.check("descent", "hitchin descent", witness),
        (true, None, false) => {
            let mut v = pcurv_core::ValidationReport::new();
            v.skip(
                "descent",
                "hitchin descent",
                &format!(
                    "anchor not generically surjective, descent not predicted: {}",
                    witness.unwrap_or_default()
                ),
            );
            report.absorb(v);
        }
    }
    Ok(failed)
}

fn finish(report: &mut Report, expected_failure: bool) {
    report.settle();
    if expected_failure && report.verdict == Verdict::Pass {
        report.verdict = Verdict::ExpectedFailure;
    }
}

pub struct Validate;

impl Command for Validate {
    fn name(&self) -> &'static str {
        "validate"
    }
    fn about(&self) -> &'static str {
        "check the algebroid axioms, the p-structure and module flatness"
    }
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError> {
        let mut report = start(built, self.name(), settings);
        let panel = settings.panel();
        let alg = &built.algebroid;
        report.absorb(validate_algebroid(alg, &panel)?);
        report.absorb(validate_p_structure(alg, &panel)?);
        report.absorb(IdentityRegistry::enveloping_axioms().run(alg, &panel)?);
        if let Some(m) = &built.module {
            report.absorb(m.validate_flatness()?);
        }
        let (surj, minor) = alg.anchor_generic_surjectivity()?;
        report.result("anchor_generically_surjective", surj);
        if let Some(m) = minor {
            report.result("surjectivity_minor", m.to_string());
        }
        finish(&mut report, false);
        Ok(report)
    }
}

pub struct PCurvatureCmd;

impl Command for PCurvatureCmd {
    fn name(&self) -> &'static str {
        "pcurvature"
    }
    fn about(&self) -> &'static str {
        "compute ψ(e_a) for each generator and check it against ι"
    }
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError> {
        let module = need_module(built, self.name())?;
        let mut report = start(built, self.name(), settings);
        p_curvature_stage(module, settings, &mut report)?;
        finish(&mut report, false);
        Ok(report)
    }
}

pub struct Hitchin;

impl Command for Hitchin {
    fn name(&self) -> &'static str {
        "hitchin"
    }
    fn about(&self) -> &'static str {
        "characteristic polynomial and Hitchin invariants of the p-curvature"
    }
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError> {
        let module = need_module(built, self.name())?;
        let mut report = start(built, self.name(), settings);
        if let Some(c) = p_curvature_stage(module, settings, &mut report)? {
            hitchin_stage(&c, &mut report)?;
        }
        finish(&mut report, false);
        Ok(report)
    }
}

pub struct Descend;

impl Command for Descend {
    fn name(&self) -> &'static str {
        "descend"
    }
    fn about(&self) -> &'static str {
        "descend the Hitchin invariants along Frobenius"
    }
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError> {
        let module = need_module(built, self.name())?;
        if built.ring.field().is_char_two() {
            return Err(Error::CharacteristicTwo("descent").into());
        }
        let mut report = start(built, self.name(), settings);
        let mut failed = false;
        if let Some(c) = p_curvature_stage(module, settings, &mut report)? {
            if let Some(inv) = hitchin_stage(&c, &mut report)? {
                failed = descent_stage(&inv, &built.algebroid, built.scenario.expect, &mut report)?;
            }
        }
        finish(&mut report, failed && built.scenario.expect.is_some());
        Ok(report)
    }
}

pub struct Rees;

impl Rees {
    /// The fiber at `t = v` of a module over a Rees family.
    fn fiber(family: &Arc<LambdaModule>, v: u64) -> Result<Arc<LambdaModule>, CliError> {
        let alg = family.algebroid().specialize_t(v)?;
        let ti = family
            .algebroid()
            .ring()
            .rees_index()
            .ok_or(Error::ReesMissing)?;
        let ring = alg.ring().clone();
        let mats = family
            .matrices()
            .iter()
            .map(|m| m.map_into(&ring, |f| Ok(f.specialize(ti, v, &ring))))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Arc::new(LambdaModule::new(&alg, mats)?))
    }

    fn family(built: &Built, module: &Arc<LambdaModule>) -> Result<Arc<LambdaModule>, CliError> {
        if built.scenario.rees {
            return Ok(module.clone());
        }
        let alg = built.algebroid.rees()?;
        let ring = alg.ring().clone();
        let mats = module
            .matrices()
            .iter()
            .map(|m| m.map_into(&ring, |f| Ok(f.embed(&ring)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(Arc::new(LambdaModule::new(&alg, mats)?))
    }
}

fn strings(ps: &[pcurv_core::Poly]) -> Vec<String> {
    ps.iter().map(ToString::to_string).collect()
}

impl Command for Rees {
    fn name(&self) -> &'static str {
        "rees"
    }
    fn about(&self) -> &'static str {
        "run the pipeline over the Rees family and compare its fibers at t = 1 and t = 0"
    }
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError> {
        let module = need_module(built, self.name())?;
        if built.ring.field().is_char_two() {
            return Err(Error::CharacteristicTwo("descent").into());
        }
        let family = Self::family(built, module)?;
        let alg = family.algebroid().clone();
        let mut report = start(built, self.name(), settings);
        let panel = settings.panel();
        report.absorb(validate_algebroid(&alg, &panel)?);
        report.absorb(validate_p_structure(&alg, &panel)?);
        let Some(c) = p_curvature_stage(&family, settings, &mut report)? else {
            finish(&mut report, false);
            return Ok(report);
        };
        let Some(inv) = hitchin_stage(&c, &mut report)? else {
            finish(&mut report, false);
            return Ok(report);
        };
        let failed = descent_stage(&inv, &alg, built.scenario.expect, &mut report)?;
        let mut fibers = BTreeMap::new();
        for v in [1u64, 0] {
            let from_family = inv.specialize_t(v)?;
            let fiber = Self::fiber(&family, v)?;
            let direct = fiber
                .p_curvature(false)
                .and_then(|fc| hitchin_invariants(&fc))
                .map(|i| i.coefficients().to_vec());
            let name = format!("specialization t = {v}");
            match direct {
                Ok(direct) => {
                    let (a, b) = (strings(&from_family), strings(&direct));
                    report.check(
                        "rees",
                        &name,
                        (a != b).then(|| {
                            format!(
                                "family gives [{}], fiber gives [{}]",
                                a.join(", "),
                                b.join(", ")
                            )
                        }),
                    );
                    fibers.insert(format!("t={v}"), json!(a));
                }
                Err(e) => report.check("rees", &name, Some(format!("fiber pipeline failed: {e}"))),
            }
        }
        if !built.scenario.rees {
            let back = alg.specialize_t(1)?;
            report.check(
                "rees",
                "fiber at t = 1 is the original algebroid",
                (*back != *built.algebroid).then(|| "structure constants differ".into()),
            );
        }
        report.result("fibers", Value::Object(fibers.into_iter().collect()));
        finish(&mut report, failed && built.scenario.expect.is_some());
        Ok(report)
    }
}

pub struct Identities;

impl Command for Identities {
    fn name(&self) -> &'static str {
        "identities"
    }
    fn about(&self) -> &'static str {
        "run the identity battery, the enveloping p-structure axioms and the ι-suite"
    }
    fn run(&self, built: &Built, settings: &Settings) -> Result<Report, CliError> {
        let mut report = start(built, self.name(), settings);
        if built.ring.field().is_char_two() {
            report.warn("p = 2: only the identities defined in characteristic 2 were run");
        }
        let registry = IdentityRegistry::standard();
        report.absorb(registry.run(&built.algebroid, &settings.panel())?);
        finish(&mut report, false);
        Ok(report)
    }
}
