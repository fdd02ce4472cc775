//! Hitchin invariants of the p-curvature and their Frobenius descent.
//!
//! The universal characteristic polynomial `det(λ·Id - Σ_a y_a ψ_a)` lives in
//! the chart ring extended by formal variables `y_1..y_m` and `λ`. Descent
//! tests coordinate exponents only, so the Rees parameter is left alone.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebroid::Algebroid;
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::lambda_module::PCurvature;
use crate::matrix::PolyMatrix;
use crate::poly::{Descent, Monomial, NotDescendable, Poly, PolyRing, VarKind};
use crate::report::ValidationReport;

/// `det(λ·Id - Σ y_a ψ_a)` together with the extended ring it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    ring: Arc<PolyRing>,
    y: Vec<usize>,
    lambda: usize,
    rank: usize,
    poly: Poly,
}

impl CharPoly {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn y_indices(&self) -> &[usize] {
        &self.y
    }

    pub fn lambda_index(&self) -> usize {
        self.lambda
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

pub fn universal_char_poly(c: &PCurvature) -> Result<CharPoly> {
    if let Some(w) = c.commuting_witness()? {
        return Err(Error::NotCommuting(w));
    }
    let base = c.module().algebroid().ring().clone();
    let m = c.psi().len();
    let r = c.module().rank();
    let mut ring = base.clone();
    let mut y = Vec::with_capacity(m);
    for a in 0..m {
        let name = ring.fresh_name(&format!("y{}", a + 1));
        ring = ring.extend(&[(name, VarKind::Formal)])?;
        y.push(ring.nvars() - 1);
    }
    let lname = ring.fresh_name("lambda");
    let ring = ring.extend(&[(lname, VarKind::Formal)])?;
    let lambda = ring.nvars() - 1;

    let mut mat = PolyMatrix::scalar(&Poly::var(&ring, lambda), r);
    for (a, psi) in c.psi().iter().enumerate() {
        let ya = Poly::var(&ring, y[a]);
        let lifted = psi.map_into(&ring, |e| Ok(e.embed(&ring)?.checked_mul(&ya)?))?;
        mat = mat.sub(&lifted)?;
    }
    Ok(CharPoly {
        poly: mat.det()?,
        ring,
        y,
        lambda,
        rank: r,
    })
}

/// The invariants `e_k`, read from `det(λ - Ψ(y)) = Σ_k (-1)^k e_k λ^{r-k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HitchinInvariants {
    char_poly: CharPoly,
    coefficients: Vec<Poly>,
}

impl HitchinInvariants {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `e_k` for `k = 1..=r`.
    pub fn coefficient(&self, k: usize) -> &Poly {
        &self.coefficients[k - 1]
    }

    pub fn coefficients(&self) -> &[Poly] {
        &self.coefficients
    }

    pub fn char_poly(&self) -> &CharPoly {
        &self.char_poly
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.char_poly.ring
    }

    /// Split `e_k` into its `y`-monomials; values carry no `y`.
    pub fn by_y_monomial(&self, k: usize) -> Vec<(String, Poly)> {
        let ring = self.ring();
        self.coefficient(k)
            .split_by(&self.char_poly.y)
            .into_iter()
            .map(|(exps, coeff)| {
                let mut mono = Monomial::one(ring.nvars());
                for (&i, &e) in self.char_poly.y.iter().zip(&exps) {
                    mono.0[i] = e;
                }
                (Poly::format_monomial(ring, &mono, 1), coeff)
            })
            .collect()
    }

    /// The invariants at `t = value`, as a polynomial in the ring without `t`.
    pub fn specialize_t(&self, value: u64) -> Result<Vec<Poly>> {
        let ring = self.ring();
        let ti = ring.rees_index().ok_or(Error::ReesMissing)?;
        let target = ring.without(ti)?;
        Ok(self
            .coefficients
            .iter()
            .map(|c| c.specialize(ti, value, &target))
            .collect())
    }
}

pub fn hitchin_invariants(c: &PCurvature) -> Result<HitchinInvariants> {
    let cp = universal_char_poly(c)?;
    let r = cp.rank;
    let by_lambda = cp.poly.split_by(&[cp.lambda]);
    let coefficients = (1..=r)
        .map(|k| {
            let v = by_lambda
                .get(&vec![(r - k) as u32])
                .cloned()
                .unwrap_or_else(|| Poly::zero(&cp.ring));
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    Ok(HitchinInvariants {
        char_poly: cp,
        coefficients,
    })
}

/// `∇^can_∂ (Σ a_i ⊗ b_i) = Σ ∂(a_i) ⊗ b_i` on a trivialized pullback.
pub fn canonical_connection_apply(section: &[Poly], d: &Derivation) -> Result<Vec<Poly>> {
    Ok(section
        .iter()
        .map(|s| d.apply(s))
        .collect::<std::result::Result<_, _>>()?)
}

/// Outcome of descending a section of a trivialized Frobenius pullback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionDescent {
    Descended(Vec<Poly>),
    NotDescendable {
        component: usize,
        witness: NotDescendable,
    },
}

impl SectionDescent {
    pub fn is_descended(&self) -> bool {
        matches!(self, SectionDescent::Descended(_))
    }
}

pub fn cartier_descend_section(section: &[Poly]) -> SectionDescent {
    let mut out = Vec::with_capacity(section.len());
    for (i, s) in section.iter().enumerate() {
        match s.pth_root_descend() {
            Descent::Descended(d) => out.push(d),
            Descent::NotDescendable(w) => {
                return SectionDescent::NotDescendable {
                    component: i,
                    witness: w,
                }
            }
        }
    }
    SectionDescent::Descended(out)
}

/// `δ_b(tr ψ_a) = 0` and `δ_b(e_k) = 0` for every anchor direction.
pub fn trace_flatness_check(c: &PCurvature) -> Result<ValidationReport> {
    const SECTION: &str = "trace flatness";
    let alg = c.module().algebroid();
    if alg.ring().field().is_char_two() {
        return Err(Error::CharacteristicTwo("trace flatness"));
    }
    let m = alg.rank();
    let degenerate = alg.has_zero_anchor();
    let mut report = ValidationReport::new();

    let mut witness = None;
    'tr: for (a, psi) in c.psi().iter().enumerate() {
        let tr = psi.trace();
        for b in 0..m {
            let d = alg.anchor(b).apply(&tr)?;
            if !d.is_zero() {
                witness = Some(format!("δ_{}(tr ψ{}) = {}", b + 1, a + 1, d));
                break 'tr;
            }
        }
    }
    report.record(SECTION, "trace of p-curvature", m * m, witness);
    if degenerate {
        report.annotate("anchor degenerate");
    }

    let inv = hitchin_invariants(c)?;
    let ring = inv.ring().clone();
    let mut witness = None;
    'ek: for k in 1..=inv.rank() {
        for b in 0..m {
            let d = alg.anchor(b).embed(&ring)?.apply(inv.coefficient(k))?;
            if !d.is_zero() {
                witness = Some(format!("δ_{}(e_{}) = {}", b + 1, k, d));
                break 'ek;
            }
        }
    }
    report.record(SECTION, "exterior power traces", inv.rank() * m, witness);
    if degenerate {
        report.annotate("anchor degenerate");
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DescentOutcome {
    Descended {
        value: String,
    },
    NotDescendable {
        witness: String,
        monomials: Vec<String>,
    },
}

/// One `(k, y-monomial)` coefficient of the Hitchin invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentEntry {
    pub k: usize,
    pub y_monomial: String,
    pub coefficient: String,
    #[serde(flatten)]
    pub outcome: DescentOutcome,
    #[serde(skip)]
    original: Poly,
    #[serde(skip)]
    descended: Option<Poly>,
}

impl DescentEntry {
    pub fn descended(&self) -> Option<&Poly> {
        self.descended.as_ref()
    }

    pub fn original(&self) -> &Poly {
        &self.original
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub generically_surjective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surjectivity_minor: Option<String>,
    pub entries: Vec<DescentEntry>,
}

impl DescentReport {
    pub fn all_descended(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.outcome, DescentOutcome::Descended { .. }))
    }

    pub fn failures(&self) -> impl Iterator<Item = &DescentEntry> {
        self.entries
            .iter()
            .filter(|e| matches!(e.outcome, DescentOutcome::NotDescendable { .. }))
    }

    /// Every descended coefficient pulls back to its original.
    pub fn is_consistent(&self) -> Result<bool> {
        for e in &self.entries {
            if let Some(d) = &e.descended {
                if d.frobenius_pullback()? != e.original {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The descended coefficient of `y-monomial` in `e_k`, if it descended.
    pub fn descended_coefficient(&self, k: usize, y_monomial: &str) -> Option<&Poly> {
        self.entries
            .iter()
            .find(|e| e.k == k && e.y_monomial == y_monomial)
            .and_then(|e| e.descended.as_ref())
    }

    /// False when the anchor is generically surjective and
    /// some coefficient failed to descend.
    pub fn descent_as_predicted(&self) -> bool {
        !self.generically_surjective || self.all_descended()
    }
}

pub fn descend_invariants(inv: &HitchinInvariants, alg: &Algebroid) -> Result<DescentReport> {
    if alg.ring().field().is_char_two() {
        return Err(Error::CharacteristicTwo("descent"));
    }
    let (surjective, minor) = alg.anchor_generic_surjectivity()?;
    let mut entries = Vec::new();
    for k in 1..=inv.rank() {
        for (y_monomial, coeff) in inv.by_y_monomial(k) {
            let (outcome, descended) = match coeff.pth_root_descend() {
                Descent::Descended(d) => (
                    DescentOutcome::Descended {
                        value: d.to_string(),
                    },
                    Some(d),
                ),
                Descent::NotDescendable(w) => (
                    DescentOutcome::NotDescendable {
                        witness: w.witness().to_string(),
                        monomials: w.monomials(),
                    },
                    None,
                ),
            };
            entries.push(DescentEntry {
                k,
                y_monomial,
                coefficient: coeff.to_string(),
                outcome,
                original: coeff,
                descended,
            });
        }
    }
    Ok(DescentReport {
        generically_surjective: surjective,
        surjectivity_minor: minor.map(|m| m.to_string()),
        entries,
    })
}

/// Both sides of `tr(A^p) = (tr A)^p`.
pub fn frobenius_trace_sides(a: &PolyMatrix) -> Result<(Poly, Poly)> {
    let p = a.ring().p();
    Ok((a.pow(p)?.trace(), a.trace().pow(p)?))
}
