//! Λ-modules on free modules of rank r, given by connection matrices, and
//! their p-curvature.
//!
//! The action of a generator is `∇_{e_a} = δ_a + A_a`. Operators on `E` are
//! matrices over the crystalline (Weyl) algebra of the chart, so composition
//! and p-th powers are exact and the order-0 assertion is syntactic.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::{Algebroid, FirstOrder};
use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::ore::{restricted_power, Operator};
use crate::panel::PanelConfig;
use crate::poly::{same_ring, Poly};
use crate::report::ValidationReport;

/// An `r × r` matrix of crystalline differential operators.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixDiffOp {
    weyl: Arc<Algebroid>,
    rank: usize,
    entries: Vec<Operator>,
}

impl MatrixDiffOp {
    pub fn zero(weyl: &Arc<Algebroid>, rank: usize) -> Self {
        Self {
            weyl: weyl.clone(),
            rank,
            entries: vec![Operator::zero(weyl); rank * rank],
        }
    }

    pub fn identity(weyl: &Arc<Algebroid>, rank: usize) -> Self {
        Self::scalar(weyl, rank, &Operator::one(weyl))
    }

    /// `op · Id`.
    pub fn scalar(weyl: &Arc<Algebroid>, rank: usize, op: &Operator) -> Self {
        let mut out = Self::zero(weyl, rank);
        for i in 0..rank {
            out.entries[i * rank + i] = op.clone();
        }
        out
    }

    pub fn from_matrix(weyl: &Arc<Algebroid>, m: &PolyMatrix) -> Self {
        Self {
            weyl: weyl.clone(),
            rank: m.rows(),
            entries: m
                .entries()
                .iter()
                .map(|f| Operator::function(weyl, f.clone()))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &Operator {
        &self.entries[i * self.rank + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Operator::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            weyl: self.weyl.clone(),
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            weyl: self.weyl.clone(),
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// Left multiplication by a function.
    pub fn left_scale(&self, f: &Poly) -> Result<Self> {
        Ok(Self {
            weyl: self.weyl.clone(),
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .map(|e| e.left_scale(f))
                .collect::<Result<_>>()?,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let r = self.rank;
        let mut out = Self::zero(&self.weyl, r);
        for i in 0..r {
            for j in 0..r {
                let mut acc = Operator::zero(&self.weyl);
                for k in 0..r {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b)?);
                    }
                }
                out.entries[i * r + j] = reduce_restricted(&acc);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::identity(&self.weyl, self.rank);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    /// The first entry with a differential part, if any.
    pub fn higher_order_witness(&self) -> Option<String> {
        self.entries
            .iter()
            .enumerate()
            .find(|(_, e)| e.degree().unwrap_or(0) > 0)
            .map(|(k, e)| {
                format!(
                    "entry ({}, {}) = {}",
                    k / self.rank + 1,
                    k % self.rank + 1,
                    e
                )
            })
    }

    /// The matrix of functions, when every entry has order 0.
    pub fn to_matrix(&self) -> Option<PolyMatrix> {
        if self.higher_order_witness().is_some() {
            return None;
        }
        let rows = (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| self.get(i, j).to_first_order().map(|fo| fo.scalar).ok())
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        PolyMatrix::from_rows(self.weyl.ring(), rows).ok()
    }

    /// Apply to a section given by its coordinates in the trivialization.
    pub fn apply(&self, section: &[Poly]) -> Result<Vec<Poly>> {
        let r = self.rank;
        if section.len() != r {
            return Err(Error::Dimension(format!(
                "section has {} components, operator has rank {r}",
                section.len()
            )));
        }
        let mut out = vec![Poly::zero(self.weyl.ring()); r];
        for (i, slot) in out.iter_mut().enumerate() {
            for (j, s) in section.iter().enumerate() {
                *slot = &*slot + &apply_weyl(&self.weyl, self.get(i, j), s)?;
            }
        }
        Ok(out)
    }
}

/// Image in `End(O)`: the central powers `∂_j^p` act as zero on sections.
fn reduce_restricted(op: &Operator) -> Operator {
    let p = op.algebroid().p() as u32;
    Operator::from_terms(
        op.algebroid(),
        op.terms()
            .filter(|(beta, _)| beta.0.iter().all(|&e| e < p))
            .map(|(beta, f)| (beta.clone(), f.clone())),
    )
}

/// Act by a crystalline operator on a function.
pub fn apply_weyl(weyl: &Algebroid, op: &Operator, s: &Poly) -> Result<Poly> {
    let mut out = Poly::zero(weyl.ring());
    for (beta, f) in op.terms() {
        let mut g = s.clone();
        for (a, &e) in beta.0.iter().enumerate().rev() {
            g = weyl.anchor(a).iterate(e as usize, &g)?;
        }
        out = &out + &f.checked_mul(&g)?;
    }
    Ok(out)
}

impl fmt::Display for MatrixDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rank)
            .map(|i| {
                let cells: Vec<String> =
                    (0..self.rank).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for MatrixDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixDiffOp({self})")
    }
}

/// A free module of rank r with connection matrices `A_a`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LambdaModule {
    alg: Arc<Algebroid>,
    weyl: Arc<Algebroid>,
    rank: usize,
    matrices: Vec<PolyMatrix>,
}

impl LambdaModule {
    pub fn new(alg: &Arc<Algebroid>, matrices: Vec<PolyMatrix>) -> Result<Self> {
        if matrices.len() != alg.rank() {
            return Err(Error::Dimension(format!(
                "module needs {} connection matrices, got {}",
                alg.rank(),
                matrices.len()
            )));
        }
        let rank = matrices.first().map_or(0, PolyMatrix::rows);
        if rank == 0 {
            return Err(Error::Dimension("module rank must be positive".into()));
        }
        for (a, m) in matrices.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::Dimension(format!(
                    "matrix for generator {} is {}x{}, expected {rank}x{rank}",
                    a + 1,
                    m.rows(),
                    m.cols()
                )));
            }
            if !same_ring(m.ring(), alg.ring()) {
                return Err(Error::Poly(crate::error::PolyError::RingMismatch));
            }
        }
        Ok(Self {
            alg: alg.clone(),
            weyl: Algebroid::tangent(alg.ring())?,
            rank,
            matrices,
        })
    }

    pub fn algebroid(&self) -> &Arc<Algebroid> {
        &self.alg
    }

    /// The crystalline operators acting on the chart.
    pub fn weyl(&self) -> &Arc<Algebroid> {
        &self.weyl
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrices(&self) -> &[PolyMatrix] {
        &self.matrices
    }

    /// A derivation as a crystalline operator `Σ_j c_j ∂_j`.
    pub fn derivation_operator(&self, d: &Derivation) -> Operator {
        let ring = self.weyl.ring();
        let coords = ring.coordinate_indices();
        let gens = coords.iter().map(|&j| d.component(j).clone()).collect();
        Operator::from_first_order(
            &self.weyl,
            &FirstOrder {
                scalar: Poly::zero(ring),
                gens,
            },
        )
    }

    fn generator_action(&self, a: usize) -> MatrixDiffOp {
        let delta = self.derivation_operator(self.alg.anchor(a));
        MatrixDiffOp::scalar(&self.weyl, self.rank, &delta)
            .add(&MatrixDiffOp::from_matrix(&self.weyl, &self.matrices[a]))
    }

    /// `∇_D = f·Id + Σ g_a (δ_a + A_a)` for `D = f + Σ g_a e_a`.
    pub fn nabla_of(&self, d: &FirstOrder) -> Result<MatrixDiffOp> {
        if d.rank() != self.alg.rank() {
            return Err(Error::Dimension(format!(
                "element has {} generator coefficients, algebroid has rank {}",
                d.rank(),
                self.alg.rank()
            )));
        }
        let mut out = MatrixDiffOp::scalar(
            &self.weyl,
            self.rank,
            &Operator::function(&self.weyl, d.scalar.clone()),
        );
        for (a, g) in d.gens.iter().enumerate() {
            if !g.is_zero() {
                out = out.add(&self.generator_action(a).left_scale(g)?);
            }
        }
        Ok(out)
    }

    /// The action of an arbitrary element `Σ f_β e^β` of `Λ`.
    pub fn represent(&self, op: &Operator) -> Result<MatrixDiffOp> {
        let m = self.alg.rank();
        let actions: Vec<MatrixDiffOp> = (0..m).map(|a| self.generator_action(a)).collect();
        let mut out = MatrixDiffOp::zero(&self.weyl, self.rank);
        for (beta, f) in op.terms() {
            let mut term = MatrixDiffOp::identity(&self.weyl, self.rank);
            for (a, &e) in beta.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&actions[a].pow(e as u64)?)?;
                }
            }
            out = out.add(&term.left_scale(f)?);
        }
        Ok(out)
    }

    /// `[∇_{e_a}, ∇_{e_b}] - ∇_{[e_a,e_b]}` for `a < b`.
    pub fn curvature(&self, a: usize, b: usize) -> Result<MatrixDiffOp> {
        let lhs = self
            .generator_action(a)
            .commutator(&self.generator_action(b))?;
        let bracket = FirstOrder::field(self.alg.bracket_coeffs(a, b).to_vec());
        Ok(lhs.sub(&self.nabla_of(&bracket)?))
    }

    pub fn validate_flatness(&self) -> Result<ValidationReport> {
        let m = self.alg.rank();
        let mut witness = None;
        let mut count = 0;
        'pairs: for a in 0..m {
            for b in a + 1..m {
                count += 1;
                let c = self.curvature(a, b)?;
                if !c.is_zero() {
                    witness = Some(format!("curvature(e{}, e{}) = {}", a + 1, b + 1, c));
                    break 'pairs;
                }
            }
        }
        let mut report = ValidationReport::new();
        report.record("module", "flatness", count, witness);
        Ok(report)
    }

    pub fn is_flat(&self) -> Result<bool> {
        Ok(self.validate_flatness()?.all_passed())
    }

    /// `ψ_a = (∇_{e_a})^p - ∇_{e_a^[p]}` for every generator. Refuses non-flat
    /// modules unless `allow_non_flat` is set.
    pub fn p_curvature(self: &Arc<Self>, allow_non_flat: bool) -> Result<PCurvature> {
        if !allow_non_flat {
            let report = self.validate_flatness()?;
            let witness = report.failures().find_map(|c| c.witness.clone());
            if let Some(w) = witness {
                return Err(Error::NotFlat(w));
            }
        }
        let p = self.alg.p();
        let psi = (0..self.alg.rank())
            .map(|a| {
                let power = self.generator_action(a).pow(p)?;
                let correction = self.nabla_of(self.alg.p_op(a))?;
                let diff = power.sub(&correction);
                if let Some(witness) = diff.higher_order_witness() {
                    return Err(Error::HigherOrder {
                        generator: a,
                        witness,
                    });
                }
                Ok(diff.to_matrix().expect("order-0 operator"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PCurvature {
            module: self.clone(),
            psi,
        })
    }
}

/// The p-curvature matrices `ψ_a = ψ_∇(e_a)` of a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCurvature {
    module: Arc<LambdaModule>,
    psi: Vec<PolyMatrix>,
}

impl PCurvature {
    pub fn module(&self) -> &Arc<LambdaModule> {
        &self.module
    }

    pub fn psi(&self) -> &[PolyMatrix] {
        &self.psi
    }

    /// `ψ(f e_a)` recomputed from scratch equals `f^p ψ_a` on a function panel.
    pub fn check_p_linearity(&self, panel: &PanelConfig) -> Result<ValidationReport> {
        let module = &self.module;
        let alg = module.algebroid();
        let ring = alg.ring();
        let p = alg.p();
        let functions = panel.functions(ring);
        let mut witness = None;
        let mut count = 0;
        'outer: for a in 0..alg.rank() {
            for f in &functions {
                count += 1;
                let d = FirstOrder::generator(f.clone(), alg.rank(), a);
                let power = module.nabla_of(&d)?.pow(p)?;
                let dp = restricted_power(alg, &d)?;
                let diff = power.sub(&module.nabla_of(&dp)?);
                let expected =
                    MatrixDiffOp::from_matrix(module.weyl(), &self.psi[a].scale(&f.pow(p)?)?);
                if diff != expected {
                    witness = Some(format!(
                        "f = {}, e{}: ψ(f e) = {}, f^p ψ(e) = {}",
                        f,
                        a + 1,
                        diff,
                        expected
                    ));
                    break 'outer;
                }
            }
        }
        let mut report = ValidationReport::new();
        report.record("p-curvature", "p-linearity", count, witness);
        Ok(report)
    }

    pub fn check_higgs_commutativity(&self) -> Result<ValidationReport> {
        let m = self.psi.len();
        let mut witness = None;
        let mut count = 0;
        'pairs: for a in 0..m {
            for b in a + 1..m {
                count += 1;
                let c = self.psi[a]
                    .mul(&self.psi[b])?
                    .sub(&self.psi[b].mul(&self.psi[a])?)?;
                if !c.is_zero() {
                    witness = Some(format!("[ψ{}, ψ{}] = {}", a + 1, b + 1, c));
                    break 'pairs;
                }
            }
        }
        let mut report = ValidationReport::new();
        report.record("p-curvature", "higgs commutativity", count, witness);
        Ok(report)
    }

    pub fn commuting_witness(&self) -> Result<Option<String>> {
        Ok(self
            .check_higgs_commutativity()?
            .checks
            .into_iter()
            .find_map(|c| c.witness))
    }

    /// `∇_{e_b} ∘ ψ_a = ψ_a ∘ ∇_{e_b}` as operators, i.e.
    /// `δ_b.(ψ_a) + [A_b, ψ_a] = 0` entrywise.
    pub fn check_flat_commutation(&self) -> Result<ValidationReport> {
        let module = &self.module;
        let m = self.psi.len();
        let mut witness = None;
        for a in 0..m {
            let psi = MatrixDiffOp::from_matrix(module.weyl(), &self.psi[a]);
            for b in 0..m {
                let c = module.generator_action(b).commutator(&psi)?;
                if !c.is_zero() {
                    witness = Some(format!("[∇_e{}, ψ{}] = {}", b + 1, a + 1, c));
                    break;
                }
            }
            if witness.is_some() {
                break;
            }
        }
        let mut report = ValidationReport::new();
        report.record("p-curvature", "flat commutation", m * m, witness);
        Ok(report)
    }

    /// `ψ_a` against the abstract action of `ι(e_a)` represented on `E`.
    pub fn check_oracle_equivalence(&self) -> Result<ValidationReport> {
        let module = &self.module;
        let alg = module.algebroid();
        let mut witness = None;
        for a in 0..alg.rank() {
            let e = FirstOrder::generator(Poly::one(alg.ring()), alg.rank(), a);
            let z = Operator::generator(alg, a)
                .pow(alg.p())?
                .sub(&Operator::from_first_order(
                    alg,
                    &restricted_power(alg, &e)?,
                ));
            let rep = module.represent(&z)?;
            let psi = MatrixDiffOp::from_matrix(module.weyl(), &self.psi[a]);
            if rep != psi {
                witness = Some(format!("e{}: ∇_ι = {}, ψ = {}", a + 1, rep, psi));
                break;
            }
        }
        let mut report = ValidationReport::new();
        report.record("p-curvature", "oracle equivalence", alg.rank(), witness);
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::PolyRing;

    fn mat(ring: &Arc<crate::poly::PolyRing>, rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::from_rows(
            ring,
            rows.iter()
                .map(|r| r.iter().map(|s| parse_poly(s, ring).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn nabla_examples() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let m = LambdaModule::new(&t, vec![mat(&r, &[&["x^2"]])]).unwrap();
        let one = m.nabla_of(&FirstOrder::function(Poly::one(&r), 1)).unwrap();
        assert_eq!(one, MatrixDiffOp::identity(m.weyl(), 1));
        let d = m
            .nabla_of(&FirstOrder::generator(Poly::one(&r), 1, 0))
            .unwrap();
        assert_eq!(d.to_string(), "[[d_x + x^2]]");
        let xd = m
            .nabla_of(&FirstOrder::generator(Poly::var(&r, 0), 1, 0))
            .unwrap();
        assert_eq!(xd.to_string(), "[[x*d_x + x^3]]");
    }

    #[test]
    fn flatness_examples() {
        let r = PolyRing::new(3, &["x", "y"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let zero = LambdaModule::new(&t, vec![mat(&r, &[&["0"]]), mat(&r, &[&["0"]])]).unwrap();
        assert!(zero.is_flat().unwrap());
        let bad = LambdaModule::new(&t, vec![mat(&r, &[&["y"]]), mat(&r, &[&["0"]])]).unwrap();
        let rep = bad.validate_flatness().unwrap();
        assert!(!rep.all_passed());
        assert!(rep.checks[0].witness.as_ref().unwrap().contains("[[2]]"));
        let h = Algebroid::higgs_trivial(&r, 2).unwrap();
        let commuting = LambdaModule::new(
            &h,
            vec![
                mat(&r, &[&["x", "1"], &["0", "x"]]),
                mat(&r, &[&["y", "2"], &["0", "y"]]),
            ],
        )
        .unwrap();
        assert!(commuting.is_flat().unwrap());
        let not = LambdaModule::new(
            &h,
            vec![
                mat(&r, &[&["0", "1"], &["0", "0"]]),
                mat(&r, &[&["0", "0"], &["1", "0"]]),
            ],
        )
        .unwrap();
        assert!(!not.is_flat().unwrap());
        let arc = Arc::new(not);
        assert!(matches!(arc.p_curvature(false), Err(Error::NotFlat(_))));
        assert!(arc.p_curvature(true).is_ok());
    }

    #[test]
    fn p_curvature_examples() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let m = Arc::new(LambdaModule::new(&t, vec![mat(&r, &[&["x^2"]])]).unwrap());
        let c = m.p_curvature(false).unwrap();
        assert_eq!(c.psi()[0].to_string(), "[[x^6 + 2]]");
        assert!(c.check_oracle_equivalence().unwrap().all_passed());
        assert!(c.check_flat_commutation().unwrap().all_passed());
        assert!(c
            .check_p_linearity(&PanelConfig::default())
            .unwrap()
            .all_passed());

        let zero = Arc::new(LambdaModule::new(&t, vec![mat(&r, &[&["0"]])]).unwrap());
        assert!(zero.p_curvature(false).unwrap().psi()[0].is_zero());

        let h = Algebroid::higgs(&r, vec![vec![Poly::var(&r, 0)]]).unwrap();
        let cm = Arc::new(LambdaModule::new(&h, vec![mat(&r, &[&["x"]])]).unwrap());
        assert_eq!(
            cm.p_curvature(false).unwrap().psi()[0].to_string(),
            "[[x^3 + 2*x^2]]"
        );
    }

    #[test]
    fn higgs_p_curvature_is_power() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let h = Algebroid::higgs_trivial(&r, 1).unwrap();
        let a = mat(&r, &[&["0", "1"], &["x", "0"]]);
        let m = Arc::new(LambdaModule::new(&h, vec![a.clone()]).unwrap());
        let c = m.p_curvature(false).unwrap();
        assert_eq!(c.psi()[0], a.pow(3).unwrap());
        assert_eq!(c.psi()[0].to_string(), "[[0, x], [x^2, 0]]");
    }

    #[test]
    fn apply_acts_on_sections() {
        let r = PolyRing::new(5, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let m = LambdaModule::new(&t, vec![mat(&r, &[&["x"]])]).unwrap();
        let d = m
            .nabla_of(&FirstOrder::generator(Poly::one(&r), 1, 0))
            .unwrap();
        let s = [parse_poly("x^2", &r).unwrap()];
        assert_eq!(d.apply(&s).unwrap()[0].to_string(), "x^3 + 2*x");
    }
}
