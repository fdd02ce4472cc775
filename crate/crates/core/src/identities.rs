//! Named identity checks over the enveloping algebra, selected at runtime.
//!
//! Each check draws from a shared deterministic [`Samples`] pool and reports
//! the number of cases it ran and the first counterexample.

use std::sync::Arc;

use crate::algebroid::{Algebroid, FirstOrder};
use crate::error::Result;
use crate::ore::{iota, lie_polynomial_sum, lie_polynomials, restricted_power, Operator, Symbol};
use crate::panel::{random_poly, PanelConfig};
use crate::poly::{Poly, PolyRing};
use crate::report::ValidationReport;

/// Deterministic inputs shared by all checks of one run.
pub struct Samples {
    pub trials: usize,
    pub functions: Vec<Poly>,
    /// Random elements of `H`.
    pub fields: Vec<FirstOrder>,
    /// Random elements of `Λ_1`.
    pub elements: Vec<FirstOrder>,
}

impl Samples {
    pub fn draw(alg: &Algebroid, panel: &PanelConfig) -> Self {
        let ring = alg.ring();
        let m = alg.rank();
        let trials = panel.trials.max(1);
        let mut rng = panel.rng();
        let deg = panel.degree;
        let field = |rng: &mut rand_chacha::ChaCha8Rng| {
            FirstOrder::field((0..m).map(|_| random_poly(rng, ring, deg, 2)).collect())
        };
        let fields: Vec<FirstOrder> = (0..trials).map(|_| field(&mut rng)).collect();
        let elements: Vec<FirstOrder> = (0..trials)
            .map(|_| {
                let mut d = field(&mut rng);
                d.scalar = random_poly(&mut rng, ring, deg, 2);
                d
            })
            .collect();
        let mut functions = panel.functions(ring);
        while functions.len() < trials {
            functions.push(random_poly(&mut rng, ring, deg, 3));
        }
        Self {
            trials,
            functions,
            fields,
            elements,
        }
    }

    fn f(&self, i: usize) -> &Poly {
        &self.functions[i % self.functions.len()]
    }

    fn field(&self, i: usize) -> &FirstOrder {
        &self.fields[i % self.fields.len()]
    }

    fn element(&self, i: usize) -> &FirstOrder {
        &self.elements[i % self.elements.len()]
    }
}

/// Number of cases run and the first counterexample, if any.
pub type Outcome = (usize, Option<String>);

pub trait IdentityCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn section(&self) -> &'static str;
    /// Whether the identity is meaningful when `p = 2`.
    fn valid_in_char_two(&self) -> bool {
        false
    }
    fn run(&self, alg: &Arc<Algebroid>, samples: &Samples) -> Result<Outcome>;
}

#[derive(Default)]
pub struct IdentityRegistry {
    checks: Vec<Box<dyn IdentityCheck>>,
}

impl IdentityRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, check: Box<dyn IdentityCheck>) {
        self.checks.push(check);
    }

    /// Jacobson, Deligne, Hochschild and the identities for iterated anchors.
    pub fn battery() -> Self {
        let mut r = Self::new();
        r.register(Box::new(Jacobson));
        r.register(Box::new(Deligne));
        r.register(Box::new(Hochschild));
        r.register(Box::new(KatzTangent));
        r.register(Box::new(ExtensionOrder0));
        r.register(Box::new(InducedAdditivity));
        r.register(Box::new(IteratedDeltaDistributive));
        r.register(Box::new(DeligneLambda));
        r
    }

    /// Centrality, p-linearity and symbols of `ι`.
    pub fn iota_suite() -> Self {
        let mut r = Self::new();
        r.register(Box::new(IotaFunctions));
        r.register(Box::new(IotaCentral));
        r.register(Box::new(IotaAdditive));
        r.register(Box::new(IotaPLinear));
        r.register(Box::new(IotaBasis));
        r.register(Box::new(IotaSymbol));
        r
    }

    /// The axioms of a p-structure on `Λ_1` for the induced `[p]`.
    pub fn enveloping_axioms() -> Self {
        let mut r = Self::new();
        r.register(Box::new(AdAxiom));
        r.register(Box::new(Additivity));
        r.register(Box::new(ScalingRule));
        r.register(Box::new(FunctionPower));
        r
    }

    /// Every registered check of the three suites.
    pub fn standard() -> Self {
        let mut r = Self::enveloping_axioms();
        r.checks.extend(Self::battery().checks);
        r.checks.extend(Self::iota_suite().checks);
        r
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn IdentityCheck> {
        self.checks
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    /// Run every check; in characteristic 2 only the checks valid there run.
    pub fn run(&self, alg: &Arc<Algebroid>, panel: &PanelConfig) -> Result<ValidationReport> {
        let samples = Samples::draw(alg, panel);
        let char_two = alg.ring().field().is_char_two();
        let mut report = ValidationReport::new();
        for check in &self.checks {
            if char_two && !check.valid_in_char_two() {
                report.skip(check.section(), check.name(), "not defined for p = 2");
                continue;
            }
            let (cases, witness) = check.run(alg, &samples)?;
            report.record(check.section(), check.name(), cases, witness);
        }
        Ok(report)
    }
}

/// The enveloping p-structure checks: axioms, identity battery and ι-suite.
pub fn check_enveloping_p_structure(
    alg: &Arc<Algebroid>,
    panel: &PanelConfig,
) -> Result<ValidationReport> {
    IdentityRegistry::standard().run(alg, panel)
}

/// Coordinate names for an `n`-dimensional chart.
pub fn chart_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

/// Battery, axioms and ι-suite over the tangent algebroid of `F_p[x_1..x_n]`.
pub fn identity_suite(p: u64, n: usize, panel: &PanelConfig) -> Result<ValidationReport> {
    let ring = PolyRing::new(p, &chart_names(n))?;
    let alg = Algebroid::tangent(&ring)?;
    check_enveloping_p_structure(&alg, panel)
}

fn op(alg: &Arc<Algebroid>, d: &FirstOrder) -> Operator {
    Operator::from_first_order(alg, d)
}

fn fun(alg: &Arc<Algebroid>, f: &Poly) -> Operator {
    Operator::function(alg, f.clone())
}

fn show(alg: &Algebroid, d: &FirstOrder) -> String {
    alg.display_first_order(d)
}

/// Runs `body` over `trials` cases, stopping at the first witness.
fn sweep(
    samples: &Samples,
    mut body: impl FnMut(usize) -> Result<Option<String>>,
) -> Result<Outcome> {
    for i in 0..samples.trials {
        if let Some(w) = body(i)? {
            return Ok((i + 1, Some(w)));
        }
    }
    Ok((samples.trials, None))
}

struct Jacobson;

impl IdentityCheck for Jacobson {
    fn name(&self) -> &'static str {
        "jacobson"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let x = op(alg, s.element(i));
            let y = op(alg, s.element(i + 1));
            let lhs = x.add(&y).pow(p)?;
            let sums = lie_polynomials(&x, &y)?;
            if let Some(bad) = sums.iter().position(|si| si.degree().unwrap_or(0) > 1) {
                return Ok(Some(format!("s_{} has degree > 1", bad + 1)));
            }
            let mut rhs = x.pow(p)?.add(&y.pow(p)?);
            for si in &sums {
                rhs = rhs.add(si);
            }
            Ok((lhs != rhs).then(|| format!("x = {x}, y = {y}: (x+y)^p = {lhs}, expected {rhs}")))
        })
    }
}

struct Deligne;

impl IdentityCheck for Deligne {
    fn name(&self) -> &'static str {
        "deligne"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let d = s.element(i);
            let f = s.f(i);
            let dop = op(alg, d);
            let lhs = fun(alg, f).mul(&dop)?.pow(p)?;
            let delta = alg.anchor_of(d)?;
            let corr = f.checked_mul(&delta.iterate(p as usize - 1, &f.pow(p - 1)?)?)?;
            let rhs = dop
                .pow(p)?
                .left_scale(&f.pow(p)?)?
                .sub(&dop.left_scale(&corr)?);
            Ok((lhs != rhs).then(|| {
                format!(
                    "f = {f}, D = {}: (fD)^p = {lhs}, expected {rhs}",
                    show(alg, d)
                )
            }))
        })
    }
}

struct Hochschild;

impl IdentityCheck for Hochschild {
    fn name(&self) -> &'static str {
        "hochschild"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let nu = alg.anchor_of(s.field(i))?;
            let f = s.f(i);
            let fnu = nu.scale_by(f)?;
            let lhs = fnu.pth_power()?;
            let rhs = nu
                .pth_power()?
                .scale_by(&f.pow(p)?)?
                .add(&nu.scale_by(&fnu.iterate(p as usize - 1, f)?)?);
            Ok((lhs != rhs).then(|| format!("f = {f}, ν = {nu}: (fν)^p = {lhs}, expected {rhs}")))
        })
    }
}

struct KatzTangent;

impl IdentityCheck for KatzTangent {
    fn name(&self) -> &'static str {
        "katz tangent"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p() as usize;
        sweep(s, |i| {
            let delta = alg.anchor_of(s.field(i))?;
            let f = s.f(i);
            let lhs = delta.scale_by(f)?.iterate(p - 1, f)?;
            let rhs = -&f.checked_mul(&delta.iterate(p - 1, &f.pow(p as u64 - 1)?)?)?;
            Ok((lhs != rhs).then(|| format!("f = {f}, δ = {delta}: {lhs} != {rhs}")))
        })
    }
}

struct ExtensionOrder0;

impl IdentityCheck for ExtensionOrder0 {
    fn name(&self) -> &'static str {
        "extension order 0"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p() as usize;
        sweep(s, |i| {
            let d = s.field(i);
            let f = s.f(i);
            let sums = lie_polynomials(&op(alg, d), &fun(alg, f))?;
            for (k, si) in sums.iter().enumerate().take(p - 2) {
                if !si.is_zero() {
                    return Ok(Some(format!(
                        "s_{}(D, f) = {si} for D = {}, f = {f}",
                        k + 1,
                        show(alg, d)
                    )));
                }
            }
            let expected = fun(alg, &alg.anchor_of(d)?.iterate(p - 1, f)?);
            let last = &sums[p - 2];
            Ok((*last != expected).then(|| {
                format!(
                    "s_{}(D, f) = {last}, expected {expected} for D = {}, f = {f}",
                    p - 1,
                    show(alg, d)
                )
            }))
        })
    }
}

struct InducedAdditivity;

impl IdentityCheck for InducedAdditivity {
    fn name(&self) -> &'static str {
        "induced additivity"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p() as usize;
        sweep(s, |i| {
            let (d1, d2) = (s.field(i), s.field(i + 1));
            let (f1, f2) = (s.f(i), s.f(i + 3));
            let delta1 = alg.anchor_of(d1)?;
            let delta2 = alg.anchor_of(d2)?;
            let delta12 = alg.anchor_of(&d1.add(d2))?;
            let x = op(alg, d1).add(&fun(alg, f1));
            let y = op(alg, d2).add(&fun(alg, f2));
            let lhs = fun(
                alg,
                &(&delta1.iterate(p - 1, f1)? + &delta2.iterate(p - 1, f2)?),
            )
            .add(&lie_polynomial_sum(&x, &y)?);
            let rhs = lie_polynomial_sum(&op(alg, d1), &op(alg, d2))?
                .add(&fun(alg, &delta12.iterate(p - 1, &(f1 + f2))?));
            Ok((lhs != rhs).then(|| {
                format!(
                    "D1 = {}, D2 = {}, f1 = {f1}, f2 = {f2}: {lhs} != {rhs}",
                    show(alg, d1),
                    show(alg, d2)
                )
            }))
        })
    }
}

struct IteratedDeltaDistributive;

impl IdentityCheck for IteratedDeltaDistributive {
    fn name(&self) -> &'static str {
        "iterated delta distributive"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p() as usize;
        sweep(s, |i| {
            let delta = alg.anchor_of(s.field(i))?;
            let (g, f) = (s.f(i), s.f(i + 1));
            let gd = delta.scale_by(g)?;
            let lhs = gd.iterate(p - 1, &g.checked_mul(f)?)?;
            let rhs = &g.pow(p as u64)?.checked_mul(&delta.iterate(p - 1, f)?)?
                + &gd.iterate(p - 1, g)?.checked_mul(f)?;
            Ok((lhs != rhs).then(|| format!("g = {g}, f = {f}, δ = {delta}: {lhs} != {rhs}")))
        })
    }
}

struct DeligneLambda;

impl IdentityCheck for DeligneLambda {
    fn name(&self) -> &'static str {
        "deligne lambda"
    }
    fn section(&self) -> &'static str {
        "identities"
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let d = s.field(i);
            let f = s.f(i);
            let lhs = restricted_power(alg, &d.scale(f)?)?;
            let delta = alg.anchor_of(d)?;
            let corr = f.checked_mul(&delta.iterate(p as usize - 1, &f.pow(p - 1)?)?)?;
            let rhs = restricted_power(alg, d)?
                .scale(&f.pow(p)?)?
                .sub(&d.scale(&corr)?);
            Ok((lhs != rhs).then(|| {
                format!(
                    "f = {f}, D = {}: (fD)^[p] = {}, expected {}",
                    show(alg, d),
                    show(alg, &lhs),
                    show(alg, &rhs)
                )
            }))
        })
    }
}

struct AdAxiom;

impl IdentityCheck for AdAxiom {
    fn name(&self) -> &'static str {
        "ad axiom"
    }
    fn section(&self) -> &'static str {
        "enveloping p-structure"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let ring = alg.ring();
        let p = alg.p() as usize;
        let targets: Vec<Operator> = (0..ring.nvars())
            .map(|j| fun(alg, &Poly::var(ring, j)))
            .chain((0..alg.rank()).map(|a| Operator::generator(alg, a)))
            .collect();
        sweep(s, |i| {
            let d = s.element(i);
            let dp = op(alg, &restricted_power(alg, d)?);
            let dop = op(alg, d);
            for e in &targets {
                let lhs = dp.commutator(e)?;
                let rhs = dop.ad_pow(p, e)?;
                if lhs != rhs {
                    return Ok(Some(format!(
                        "D = {}, E = {e}: ad(D^[p])(E) = {lhs}, ad(D)^p(E) = {rhs}",
                        show(alg, d)
                    )));
                }
            }
            Ok(None)
        })
    }
}

struct Additivity;

impl IdentityCheck for Additivity {
    fn name(&self) -> &'static str {
        "additivity"
    }
    fn section(&self) -> &'static str {
        "enveloping p-structure"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        sweep(s, |i| {
            let (d1, d2) = (s.element(i), s.element(i + 1));
            let lhs = op(alg, &restricted_power(alg, &d1.add(d2))?);
            let rhs = op(alg, &restricted_power(alg, d1)?)
                .add(&op(alg, &restricted_power(alg, d2)?))
                .add(&lie_polynomial_sum(&op(alg, d1), &op(alg, d2))?);
            Ok((lhs != rhs).then(|| {
                format!(
                    "D1 = {}, D2 = {}: {lhs} != {rhs}",
                    show(alg, d1),
                    show(alg, d2)
                )
            }))
        })
    }
}

struct ScalingRule;

impl IdentityCheck for ScalingRule {
    fn name(&self) -> &'static str {
        "scaling rule"
    }
    fn section(&self) -> &'static str {
        "enveloping p-structure"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let d = s.element(i);
            let f = s.f(i);
            let fd = d.scale(f)?;
            let lhs = op(alg, &restricted_power(alg, &fd)?);
            let corr = op(alg, &fd).ad_pow(p as usize - 1, &fun(alg, f))?;
            let rhs = op(alg, &restricted_power(alg, d)?)
                .left_scale(&f.pow(p)?)?
                .add(&corr.mul(&op(alg, d))?);
            Ok((lhs != rhs).then(|| format!("f = {f}, D = {}: {lhs} != {rhs}", show(alg, d))))
        })
    }
}

struct FunctionPower;

impl IdentityCheck for FunctionPower {
    fn name(&self) -> &'static str {
        "function power"
    }
    fn section(&self) -> &'static str {
        "enveloping p-structure"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let f = s.f(i);
            let lhs = restricted_power(alg, &FirstOrder::function(f.clone(), alg.rank()))?;
            let rhs = FirstOrder::function(f.pow(p)?, alg.rank());
            Ok((lhs != rhs).then(|| format!("f = {f}: f^[p] = {}", show(alg, &lhs))))
        })
    }
}

struct IotaFunctions;

impl IdentityCheck for IotaFunctions {
    fn name(&self) -> &'static str {
        "iota vanishes on functions"
    }
    fn section(&self) -> &'static str {
        "iota"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        sweep(s, |i| {
            let f = s.f(i);
            let z = iota(alg, &FirstOrder::function(f.clone(), alg.rank()))?;
            Ok((!z.is_zero()).then(|| format!("ι({f}) = {z}")))
        })
    }
}

struct IotaCentral;

impl IdentityCheck for IotaCentral {
    fn name(&self) -> &'static str {
        "iota centrality"
    }
    fn section(&self) -> &'static str {
        "iota"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        sweep(s, |i| {
            let d = s.element(i);
            let z = op(alg, d)
                .pow(alg.p())?
                .sub(&op(alg, &restricted_power(alg, d)?));
            Ok(z.centrality_witness()?
                .map(|w| format!("D = {}: ι(D) = {z}, {w}", show(alg, d))))
        })
    }
}

struct IotaAdditive;

impl IdentityCheck for IotaAdditive {
    fn name(&self) -> &'static str {
        "iota additivity"
    }
    fn section(&self) -> &'static str {
        "iota"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        sweep(s, |i| {
            let (d1, d2) = (s.element(i), s.element(i + 1));
            let lhs = iota(alg, &d1.add(d2))?;
            let rhs = iota(alg, d1)?.add(&iota(alg, d2)?);
            Ok((lhs != rhs).then(|| {
                format!(
                    "D1 = {}, D2 = {}: {lhs} != {rhs}",
                    show(alg, d1),
                    show(alg, d2)
                )
            }))
        })
    }
}

struct IotaPLinear;

impl IdentityCheck for IotaPLinear {
    fn name(&self) -> &'static str {
        "iota p-linearity"
    }
    fn section(&self) -> &'static str {
        "iota"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let d = s.element(i);
            let f = s.f(i);
            let lhs = iota(alg, &d.scale(f)?)?;
            let rhs = iota(alg, d)?.left_scale(&f.pow(p)?)?;
            Ok((lhs != rhs).then(|| format!("f = {f}, D = {}: {lhs} != {rhs}", show(alg, d))))
        })
    }
}

struct IotaBasis;

impl IdentityCheck for IotaBasis {
    fn name(&self) -> &'static str {
        "iota basis expansion"
    }
    fn section(&self) -> &'static str {
        "iota"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        let m = alg.rank();
        let basis = (0..m)
            .map(|a| iota(alg, &FirstOrder::generator(Poly::one(alg.ring()), m, a)))
            .collect::<Result<Vec<_>>>()?;
        sweep(s, |i| {
            let d = s.element(i);
            let lhs = iota(alg, d)?;
            let mut rhs = Operator::zero(alg);
            for (g, z) in d.gens.iter().zip(&basis) {
                rhs = rhs.add(&z.left_scale(&g.pow(p)?)?);
            }
            Ok((lhs != rhs)
                .then(|| format!("D = {}: ι(D) = {lhs}, Σ g^p ι(e) = {rhs}", show(alg, d))))
        })
    }
}

struct IotaSymbol;

impl IdentityCheck for IotaSymbol {
    fn name(&self) -> &'static str {
        "iota symbol"
    }
    fn section(&self) -> &'static str {
        "iota"
    }
    fn valid_in_char_two(&self) -> bool {
        true
    }
    fn run(&self, alg: &Arc<Algebroid>, s: &Samples) -> Result<Outcome> {
        let p = alg.p();
        sweep(s, |i| {
            let d = s.element(i);
            let sym = Symbol::from_first_order(alg, d);
            if sym.is_zero() {
                return Ok(None);
            }
            let lhs = iota(alg, d)?.symbol_top();
            let rhs = sym.pow(p)?;
            Ok((lhs != rhs)
                .then(|| format!("D = {}: sb(ι(D)) = {lhs}, sb(D)^p = {rhs}", show(alg, d))))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> PanelConfig {
        PanelConfig {
            seed: 1,
            trials: 6,
            degree: 2,
        }
    }

    #[test]
    fn registry_lookup() {
        let r = IdentityRegistry::standard();
        assert!(r.get("jacobson").is_some());
        assert!(r.get("iota symbol").is_some());
        assert!(r.get("nonexistent").is_none());
        assert_eq!(r.len(), 18);
    }

    #[test]
    fn tangent_suites_pass() {
        for (p, n) in [(3, 1), (3, 2), (5, 1)] {
            let rep = identity_suite(p, n, &quick()).unwrap();
            assert!(rep.all_passed(), "p={p} n={n}\n{rep}");
        }
    }

    #[test]
    fn characteristic_two_subset() {
        let rep = identity_suite(2, 1, &quick()).unwrap();
        assert!(rep.all_passed(), "{rep}");
        assert_eq!(
            rep.get("katz tangent").unwrap().status,
            crate::report::Status::Skipped
        );
        assert_ne!(
            rep.get("deligne").unwrap().status,
            crate::report::Status::Skipped
        );
    }

    #[test]
    fn higgs_and_rees_pass() {
        let ring = PolyRing::new(3, &["x"]).unwrap();
        let h = Algebroid::higgs(&ring, vec![vec![Poly::var(&ring, 0)]]).unwrap();
        let rep = check_enveloping_p_structure(&h, &quick()).unwrap();
        assert!(rep.all_passed(), "{rep}");
        let rees = Algebroid::tangent(&ring).unwrap().rees().unwrap();
        let rep = check_enveloping_p_structure(&rees, &quick()).unwrap();
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn constant_shift_is_a_valid_structure() {
        // ∂^[3] := 1 is the shift by the central element 1, so every axiom holds.
        let ring = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&ring).unwrap();
        let shifted = t
            .shift_p_structure(&[FirstOrder::function(Poly::one(&ring), 1)])
            .unwrap();
        let rep = check_enveloping_p_structure(&shifted, &quick()).unwrap();
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn broken_structure_is_caught() {
        // ∂^[3] := ∂ violates the ad axiom
        let ring = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&ring).unwrap();
        let broken = Algebroid::new(
            &ring,
            vec!["d_x".into()],
            vec![vec![vec![Poly::zero(&ring)]]],
            vec![t.anchor(0).clone()],
            vec![FirstOrder::generator(Poly::one(&ring), 1, 0)],
        )
        .unwrap();
        let rep = IdentityRegistry::enveloping_axioms()
            .run(&broken, &quick())
            .unwrap();
        assert!(!rep.passed("ad axiom"));
    }
}
