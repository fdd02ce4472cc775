//! Restricted Lie algebroids `(H, [-,-], δ, [p])` on a free module `H` of rank
//! `m`, given by structure constants over the chart ring.
//!
//! `[e_a, e_b] = Σ_k c_ab^k e_k`, `δ(e_a)` is a derivation, and the
//! p-operation is recorded on the basis as an element of `Λ_1 = O ⊕ H`
//! (the `O` part is nonzero only after a central shift).

use std::fmt;
use std::sync::Arc;

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::ore::{lie_polynomials, restricted_power, Operator};
use crate::panel::{random_poly, PanelConfig};
use crate::poly::{same_ring, Poly, PolyRing, VarKind};
use crate::report::ValidationReport;

/// Default cap on the number of stored monomials in a normal form.
pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

/// An element `f + Σ_a g_a e_a` of `Λ_1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FirstOrder {
    pub scalar: Poly,
    pub gens: Vec<Poly>,
}

impl FirstOrder {
    pub fn zero(ring: &Arc<PolyRing>, rank: usize) -> Self {
        Self {
            scalar: Poly::zero(ring),
            gens: vec![Poly::zero(ring); rank],
        }
    }

    pub fn function(f: Poly, rank: usize) -> Self {
        let ring = f.ring().clone();
        Self {
            scalar: f,
            gens: vec![Poly::zero(&ring); rank],
        }
    }

    /// `g · e_a`.
    pub fn generator(g: Poly, rank: usize, a: usize) -> Self {
        let mut out = Self::zero(g.ring(), rank);
        out.gens[a] = g;
        out
    }

    /// The `H` part `Σ g_a e_a` with the given coefficients.
    pub fn field(gens: Vec<Poly>) -> Self {
        let ring = gens[0].ring().clone();
        Self {
            scalar: Poly::zero(&ring),
            gens,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.scalar.ring()
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.gens.iter().all(Poly::is_zero)
    }

    /// The symbol: the same element with the `O` part dropped.
    pub fn symbol(&self) -> Self {
        Self {
            scalar: Poly::zero(self.ring()),
            gens: self.gens.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            scalar: &self.scalar + &other.scalar,
            gens: self
                .gens
                .iter()
                .zip(&other.gens)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            scalar: &self.scalar - &other.scalar,
            gens: self
                .gens
                .iter()
                .zip(&other.gens)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Left multiplication by a function.
    pub fn scale(&self, f: &Poly) -> Result<Self> {
        Ok(Self {
            scalar: f.checked_mul(&self.scalar)?,
            gens: self
                .gens
                .iter()
                .map(|g| f.checked_mul(g))
                .collect::<std::result::Result<_, _>>()?,
        })
    }

    pub fn map_polys<F: FnMut(&Poly) -> Poly>(&self, mut f: F) -> Self {
        Self {
            scalar: f(&self.scalar),
            gens: self.gens.iter().map(&mut f).collect(),
        }
    }
}

/// A presentation of a restricted Lie algebroid on a free module.
#[derive(Clone, PartialEq, Eq)]
pub struct Algebroid {
    ring: Arc<PolyRing>,
    generators: Vec<String>,
    bracket: Vec<Vec<Vec<Poly>>>,
    anchor: Vec<Derivation>,
    p_op: Vec<FirstOrder>,
    abelian: bool,
    term_limit: usize,
}

impl fmt::Debug for Algebroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebroid")
            .field("ring", &self.ring.names())
            .field("generators", &self.generators)
            .finish()
    }
}

impl Algebroid {
    pub fn new(
        ring: &Arc<PolyRing>,
        generators: Vec<String>,
        bracket: Vec<Vec<Vec<Poly>>>,
        anchor: Vec<Derivation>,
        p_op: Vec<FirstOrder>,
    ) -> Result<Arc<Self>> {
        let m = generators.len();
        if m == 0 {
            return Err(Error::Dimension(
                "an algebroid needs at least one generator".into(),
            ));
        }
        let square = bracket.len() == m
            && bracket
                .iter()
                .all(|row| row.len() == m && row.iter().all(|c| c.len() == m));
        if !square {
            return Err(Error::Dimension(format!(
                "bracket table must be {m} x {m} x {m}"
            )));
        }
        if anchor.len() != m || p_op.len() != m {
            return Err(Error::Dimension(format!(
                "anchor and p-operation need one entry per generator ({m})"
            )));
        }
        if p_op.iter().any(|q| q.rank() != m) {
            return Err(Error::Dimension(format!(
                "p-operation values need {m} generator coefficients"
            )));
        }
        let rings_ok = bracket
            .iter()
            .flatten()
            .flatten()
            .all(|c| same_ring(c.ring(), ring))
            && anchor.iter().all(|d| same_ring(d.ring(), ring))
            && p_op.iter().all(|q| {
                same_ring(q.ring(), ring) && q.gens.iter().all(|g| same_ring(g.ring(), ring))
            });
        if !rings_ok {
            return Err(Error::Poly(crate::error::PolyError::RingMismatch));
        }
        for (a, d) in anchor.iter().enumerate() {
            for (j, c) in d.components().iter().enumerate() {
                if ring.kind(j) != VarKind::Coordinate && !c.is_zero() {
                    return Err(Error::Dimension(format!(
                        "anchor of generator {a} moves the non-coordinate variable {}",
                        ring.names()[j]
                    )));
                }
            }
        }
        let abelian = bracket.iter().flatten().flatten().all(Poly::is_zero);
        Ok(Arc::new(Self {
            ring: ring.clone(),
            generators,
            bracket,
            anchor,
            p_op,
            abelian,
            term_limit: DEFAULT_TERM_LIMIT,
        }))
    }

    /// Same presentation with a different normal-form size limit.
    pub fn with_term_limit(&self, limit: usize) -> Arc<Self> {
        Arc::new(Self {
            term_limit: limit,
            ..self.clone()
        })
    }

    /// Crystalline operators: `H = T` with basis `∂_j` over the coordinates
    /// (relative to the Rees parameter when present), `[p]` the p-th power of
    /// derivations.
    pub fn tangent(ring: &Arc<PolyRing>) -> Result<Arc<Self>> {
        let coords = ring.coordinate_indices();
        let m = coords.len();
        let generators = coords
            .iter()
            .map(|&j| format!("d_{}", ring.names()[j]))
            .collect();
        let zero = Poly::zero(ring);
        let bracket = vec![vec![vec![zero.clone(); m]; m]; m];
        let anchor: Vec<Derivation> = coords
            .iter()
            .map(|&j| Derivation::partial(ring, j))
            .collect();
        let p_op = anchor
            .iter()
            .map(|d| {
                let pow = d.pth_power()?;
                Ok(FirstOrder::field(
                    coords.iter().map(|&j| pow.component(j).clone()).collect(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, generators, bracket, anchor, p_op)
    }

    /// Abelian algebroid with zero anchor and p-linear `[p]` given on the basis
    /// by `e_a^[p] = Σ_k alpha[a][k] e_k`.
    pub fn higgs(ring: &Arc<PolyRing>, alpha: Vec<Vec<Poly>>) -> Result<Arc<Self>> {
        let m = alpha.len();
        if m == 0 || alpha.iter().any(|row| row.len() != m) {
            return Err(Error::Dimension(format!(
                "alpha must be a square matrix, got {m} rows"
            )));
        }
        let generators = (1..=m).map(|a| format!("e{a}")).collect();
        let zero = Poly::zero(ring);
        let bracket = vec![vec![vec![zero.clone(); m]; m]; m];
        let anchor = vec![Derivation::zero(ring); m];
        let p_op = alpha.into_iter().map(FirstOrder::field).collect();
        Self::new(ring, generators, bracket, anchor, p_op)
    }

    /// Higgs algebroid with the trivial p-structure.
    pub fn higgs_trivial(ring: &Arc<PolyRing>, m: usize) -> Result<Arc<Self>> {
        Self::higgs(ring, vec![vec![Poly::zero(ring); m]; m])
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generators
    }

    pub fn bracket_coeffs(&self, a: usize, b: usize) -> &[Poly] {
        &self.bracket[a][b]
    }

    pub fn anchor(&self, a: usize) -> &Derivation {
        &self.anchor[a]
    }

    pub fn p_op(&self, a: usize) -> &FirstOrder {
        &self.p_op[a]
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn has_zero_anchor(&self) -> bool {
        self.anchor.iter().all(Derivation::is_zero)
    }

    pub fn term_limit(&self) -> usize {
        self.term_limit
    }

    /// The anchor `δ` of the `H` part of a first-order element.
    pub fn anchor_of(&self, d: &FirstOrder) -> Result<Derivation> {
        let mut out = Derivation::zero(&self.ring);
        for (g, delta) in d.gens.iter().zip(&self.anchor) {
            if !g.is_zero() && !delta.is_zero() {
                out = out.add(&delta.scale_by(g)?);
            }
        }
        Ok(out)
    }

    /// The bracket on `H` extended by the Leibniz rule:
    /// `[g e_a, h e_b] = gh [e_a,e_b] + g δ_a(h) e_b - h δ_b(g) e_a`.
    pub fn bracket_h(&self, d1: &[Poly], d2: &[Poly]) -> Result<Vec<Poly>> {
        let m = self.rank();
        let mut out = vec![Poly::zero(&self.ring); m];
        for a in 0..m {
            if d1[a].is_zero() {
                continue;
            }
            for b in 0..m {
                if d2[b].is_zero() {
                    continue;
                }
                let gh = d1[a].checked_mul(&d2[b])?;
                for (slot, c) in out.iter_mut().zip(&self.bracket[a][b]) {
                    if !c.is_zero() {
                        *slot = &*slot + &gh.checked_mul(c)?;
                    }
                }
                let da_h = self.anchor[a].apply(&d2[b])?;
                out[b] = &out[b] + &d1[a].checked_mul(&da_h)?;
                let db_g = self.anchor[b].apply(&d1[a])?;
                out[a] = &out[a] - &d2[b].checked_mul(&db_g)?;
            }
        }
        Ok(out)
    }

    /// Rees deformation over `ring[t]`: bracket and anchor scaled by `t`,
    /// p-operation by `t^(p-1)`.
    pub fn rees(&self) -> Result<Arc<Self>> {
        if self.ring.rees_index().is_some() {
            return Err(Error::ReesPresent);
        }
        let name = self.ring.fresh_name("t");
        let ring = self.ring.extend(&[(name, VarKind::Rees)])?;
        let t = Poly::var(&ring, ring.nvars() - 1);
        let tp = t.pow(self.p() - 1)?;
        let lift = |f: &Poly, s: &Poly| -> Result<Poly> { Ok(s.checked_mul(&f.embed(&ring)?)?) };
        let bracket = self
            .bracket
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.iter().map(|f| lift(f, &t)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let anchor = self
            .anchor
            .iter()
            .map(|d| Ok(d.embed(&ring)?.scale_by(&t)?))
            .collect::<Result<Vec<_>>>()?;
        let p_op = self
            .p_op
            .iter()
            .map(|q| {
                Ok(FirstOrder {
                    scalar: lift(&q.scalar, &tp)?,
                    gens: q.gens.iter().map(|g| lift(g, &tp)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&ring, self.generators.clone(), bracket, anchor, p_op)
    }

    /// The fiber of a Rees family at `t = value`.
    pub fn specialize_t(&self, value: u64) -> Result<Arc<Self>> {
        let ti = self.ring.rees_index().ok_or(Error::ReesMissing)?;
        let ring = self.ring.without(ti)?;
        let sp = |f: &Poly| f.specialize(ti, value, &ring);
        let bracket = self
            .bracket
            .iter()
            .map(|row| row.iter().map(|c| c.iter().map(sp).collect()).collect())
            .collect();
        let anchor = self
            .anchor
            .iter()
            .map(|d| d.specialize(ti, value, &ring))
            .collect();
        let p_op = self.p_op.iter().map(|q| q.map_polys(sp)).collect();
        Self::new(&ring, self.generators.clone(), bracket, anchor, p_op)
    }

    /// Replace `[p]` by `[p] + φ∘sb`. Each `φ(e_a)` must be central in `Λ`;
    /// basis values always extend p-linearly via `φ(Σ f_a e_a) = Σ f_a^p φ(e_a)`.
    pub fn shift_p_structure(self: &Arc<Self>, phi: &[FirstOrder]) -> Result<Arc<Self>> {
        if phi.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "shift needs {} values, got {}",
                self.rank(),
                phi.len()
            )));
        }
        for (a, value) in phi.iter().enumerate() {
            if value.rank() != self.rank() || !same_ring(value.ring(), &self.ring) {
                return Err(Error::Dimension(format!(
                    "shift value {a} has the wrong shape"
                )));
            }
            let op = Operator::from_first_order(self, value);
            if let Some(w) = op.centrality_witness()? {
                return Err(Error::ShiftRejected {
                    generator: a,
                    reason: format!("value {} is not central: {}", value_display(self, value), w),
                });
            }
        }
        let p_op = self.p_op.iter().zip(phi).map(|(q, f)| q.add(f)).collect();
        Self::new(
            &self.ring,
            self.generators.clone(),
            self.bracket.clone(),
            self.anchor.clone(),
            p_op,
        )
    }

    /// Whether the anchor is generically surjective onto the coordinate
    /// fields: some maximal minor of the anchor matrix is a nonzero polynomial.
    /// The witness is that minor.
    pub fn anchor_generic_surjectivity(&self) -> Result<(bool, Option<Poly>)> {
        let coords = self.ring.coordinate_indices();
        let n = coords.len();
        let m = self.rank();
        if m < n {
            return Ok((false, None));
        }
        let rows: Vec<Vec<Poly>> = self
            .anchor
            .iter()
            .map(|d| coords.iter().map(|&j| d.component(j).clone()).collect())
            .collect();
        for choice in combinations(m, n) {
            let sub: Vec<Vec<Poly>> = choice.iter().map(|&a| rows[a].clone()).collect();
            let minor = crate::matrix::PolyMatrix::from_rows(&self.ring, sub)?.det()?;
            if !minor.is_zero() {
                return Ok((true, Some(minor)));
            }
        }
        Ok((false, None))
    }

    pub fn display_first_order(&self, d: &FirstOrder) -> String {
        value_display(self, d)
    }
}

fn value_display(alg: &Algebroid, d: &FirstOrder) -> String {
    let mut parts = Vec::new();
    if !d.scalar.is_zero() {
        parts.push(format!("{}", d.scalar));
    }
    for (g, name) in d.gens.iter().zip(alg.generator_names()) {
        if !g.is_zero() {
            if g.is_one() {
                parts.push(name.clone());
            } else {
                parts.push(format!("({})*{}", g, name));
            }
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn combinations(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for a in start..m {
            cur.push(a);
            rec(a + 1, m, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, n, &mut Vec::new(), &mut out);
    out
}

/// Structural axioms: antisymmetry, Jacobi (with anchor corrections), the
/// Leibniz rule against a function panel, and `δ[D1,D2] = [δD1, δD2]`.
pub fn validate_algebroid(alg: &Arc<Algebroid>, panel: &PanelConfig) -> Result<ValidationReport> {
    const SECTION: &str = "algebroid";
    let m = alg.rank();
    let ring = alg.ring();
    let mut report = ValidationReport::new();

    let mut witness = None;
    'anti: for a in 0..m {
        for b in 0..m {
            for k in 0..m {
                let sum = &alg.bracket[a][b][k] + &alg.bracket[b][a][k];
                if !sum.is_zero() {
                    witness = Some(format!(
                        "c[{}][{}][{}] + c[{}][{}][{}] = {}",
                        a + 1,
                        b + 1,
                        k + 1,
                        b + 1,
                        a + 1,
                        k + 1,
                        sum
                    ));
                    break 'anti;
                }
            }
        }
    }
    report.record(SECTION, "antisymmetry", m * m, witness);

    let basis = |a: usize| -> Vec<Poly> {
        (0..m)
            .map(|k| {
                if k == a {
                    Poly::one(ring)
                } else {
                    Poly::zero(ring)
                }
            })
            .collect()
    };
    let mut witness = None;
    let mut count = 0;
    'jac: for a in 0..m {
        for b in a..m {
            for c in b..m {
                count += 1;
                let (ea, eb, ec) = (basis(a), basis(b), basis(c));
                let t1 = alg.bracket_h(&ea, &alg.bracket_h(&eb, &ec)?)?;
                let t2 = alg.bracket_h(&eb, &alg.bracket_h(&ec, &ea)?)?;
                let t3 = alg.bracket_h(&ec, &alg.bracket_h(&ea, &eb)?)?;
                for k in 0..m {
                    let s = &(&t1[k] + &t2[k]) + &t3[k];
                    if !s.is_zero() {
                        witness = Some(format!(
                            "Jacobi(e{}, e{}, e{}) has component {} on e{}",
                            a + 1,
                            b + 1,
                            c + 1,
                            s,
                            k + 1
                        ));
                        break 'jac;
                    }
                }
            }
        }
    }
    report.record(SECTION, "jacobi", count, witness);

    let functions = panel.functions(ring);
    let mut witness = None;
    let mut count = 0;
    'leib: for a in 0..m {
        for b in 0..m {
            let ea = Operator::generator(alg, a);
            for f in &functions {
                count += 1;
                let feb = Operator::generator(alg, b).left_scale(f)?;
                let lhs = ea.commutator(&feb)?;
                let mut rhs = FirstOrder::field(alg.bracket[a][b].clone()).scale(f)?;
                rhs.gens[b] = &rhs.gens[b] + &alg.anchor[a].apply(f)?;
                if lhs != Operator::from_first_order(alg, &rhs) {
                    witness = Some(format!(
                        "[e{}, f*e{}] with f = {}: got {}, expected {}",
                        a + 1,
                        b + 1,
                        f,
                        lhs,
                        value_display(alg, &rhs)
                    ));
                    break 'leib;
                }
            }
        }
    }
    report.record(SECTION, "leibniz", count, witness);

    let mut witness = None;
    'anch: for a in 0..m {
        for b in 0..m {
            let lhs = alg.anchor_of(&FirstOrder::field(alg.bracket[a][b].clone()))?;
            let rhs = alg.anchor[a].bracket(&alg.anchor[b])?;
            if lhs != rhs {
                witness = Some(format!(
                    "δ([e{}, e{}]) = {} but [δ_{}, δ_{}] = {}",
                    a + 1,
                    b + 1,
                    lhs,
                    a + 1,
                    b + 1,
                    rhs
                ));
                break 'anch;
            }
        }
    }
    report.record(SECTION, "anchor compatibility", m * m, witness);
    Ok(report)
}

/// Restricted axioms for the presented p-operation: `ad(D^[p]) = ad(D)^p`,
/// additivity with the Lie polynomials `s_i`, the `(fD)^[p]` rule, the
/// Hochschild-type identity for the anchor, and (in its own section) the
/// anchor-restricted compatibility `δ(D^[p]) = δ(D)^p`.
pub fn validate_p_structure(alg: &Arc<Algebroid>, panel: &PanelConfig) -> Result<ValidationReport> {
    const SECTION: &str = "p-structure";
    let m = alg.rank();
    let ring = alg.ring();
    let p = alg.p() as usize;
    let mut report = ValidationReport::new();
    let mut rng = panel.rng();

    // ad-axiom on basis elements, tested against generators and coordinates.
    let mut witness = None;
    let mut count = 0;
    let coordinate_ops: Vec<(String, Operator)> = (0..ring.nvars())
        .map(|j| {
            (
                ring.names()[j].clone(),
                Operator::function(alg, Poly::var(ring, j)),
            )
        })
        .collect();
    let generator_ops: Vec<(String, Operator)> = (0..m)
        .map(|b| (alg.generators[b].clone(), Operator::generator(alg, b)))
        .collect();
    let mut sources: Vec<(String, FirstOrder)> = (0..m)
        .map(|a| {
            (
                alg.generators[a].clone(),
                FirstOrder::generator(Poly::one(ring), m, a),
            )
        })
        .collect();
    for _ in 0..panel.trials.min(4) {
        let d = FirstOrder::field(
            (0..m)
                .map(|_| random_poly(&mut rng, ring, panel.degree.min(2), 2))
                .collect(),
        );
        sources.push((value_display(alg, &d), d));
    }
    'ad: for (label, d) in &sources {
        let dp = Operator::from_first_order(alg, &restricted_power(alg, d)?);
        let dop = Operator::from_first_order(alg, d);
        for (target_label, target) in coordinate_ops.iter().chain(&generator_ops) {
            count += 1;
            let lhs = dp.commutator(target)?;
            let rhs = dop.ad_pow(p, target)?;
            if lhs != rhs {
                witness = Some(format!(
                    "D = {}, E = {}: ad(D^[p])(E) = {} but ad(D)^p(E) = {}",
                    label, target_label, lhs, rhs
                ));
                break 'ad;
            }
        }
    }
    report.record(SECTION, "ad-axiom", count, witness);

    let pairs: Vec<(FirstOrder, FirstOrder)> = (0..panel.trials.max(1))
        .map(|_| {
            let mut d = || {
                FirstOrder::field(
                    (0..m)
                        .map(|_| random_poly(&mut rng, ring, panel.degree, 3))
                        .collect(),
                )
            };
            (d(), d())
        })
        .collect();
    let mut witness = None;
    for (d1, d2) in &pairs {
        let lhs = restricted_power(alg, &d1.add(d2))?;
        let mut rhs = restricted_power(alg, d1)?.add(&restricted_power(alg, d2)?);
        let s = lie_polynomials(
            &Operator::from_first_order(alg, d1),
            &Operator::from_first_order(alg, d2),
        )?;
        for si in s {
            rhs = rhs.add(&si.to_first_order()?);
        }
        if lhs != rhs {
            witness = Some(format!(
                "D1 = {}, D2 = {}: (D1+D2)^[p] = {}, sum = {}",
                value_display(alg, d1),
                value_display(alg, d2),
                value_display(alg, &lhs),
                value_display(alg, &rhs)
            ));
            break;
        }
    }
    report.record(SECTION, "additivity", pairs.len(), witness);

    let functions = panel.functions(ring);
    let mut witness = None;
    let mut count = 0;
    'fd: for (i, f) in functions.iter().enumerate() {
        let d = &pairs[i % pairs.len()].0;
        count += 1;
        let fd = d.scale(f)?;
        let lhs = restricted_power(alg, &fd)?;
        let delta_fd = alg.anchor_of(&fd)?;
        let corr = delta_fd.iterate(p - 1, f)?;
        let rhs = restricted_power(alg, d)?
            .scale(&f.pow(p as u64)?)?
            .add(&d.scale(&corr)?);
        if lhs != rhs {
            witness = Some(format!(
                "f = {}, D = {}: (fD)^[p] = {}, expected {}",
                f,
                value_display(alg, d),
                value_display(alg, &lhs),
                value_display(alg, &rhs)
            ));
            break 'fd;
        }
    }
    report.record(SECTION, "(fD)^[p] rule", count, witness);

    let mut witness = None;
    for (i, f) in functions.iter().enumerate() {
        let d = &pairs[i % pairs.len()].1;
        let delta = alg.anchor_of(d)?;
        let lhs = delta.scale_by(f)?.iterate(p - 1, f)?;
        let rhs = -&f.checked_mul(&delta.iterate(p - 1, &f.pow(p as u64 - 1)?)?)?;
        if lhs != rhs {
            witness = Some(format!(
                "f = {}, D = {}: {} != {}",
                f,
                value_display(alg, d),
                lhs,
                rhs
            ));
            break;
        }
    }
    report.record(SECTION, "hochschild identity", functions.len(), witness);

    let mut witness = None;
    for a in 0..m {
        let lhs = alg.anchor_of(&alg.p_op[a])?;
        let rhs = alg.anchor[a].pth_power()?;
        if lhs != rhs {
            witness = Some(format!(
                "δ(e{}^[p]) = {} but δ(e{})^p = {}",
                a + 1,
                lhs,
                a + 1,
                rhs
            ));
            break;
        }
    }
    report.record(
        "anchor-restricted compatibility",
        "δ(D^[p]) = δ(D)^p",
        m,
        witness,
    );
    Ok(report)
}

/// Read the bracket, anchor and p-operation back from the enveloping algebra
/// through symbols.
pub fn induced_presentation(alg: &Arc<Algebroid>) -> Result<Arc<Algebroid>> {
    let m = alg.rank();
    let ring = alg.ring();
    let mut bracket = vec![vec![Vec::new(); m]; m];
    for (a, row) in bracket.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            let c = Operator::generator(alg, a).commutator(&Operator::generator(alg, b))?;
            *slot = c.to_first_order()?.gens;
        }
    }
    let anchor = (0..m)
        .map(|a| {
            let comps = (0..ring.nvars())
                .map(|j| {
                    let c = Operator::generator(alg, a)
                        .commutator(&Operator::function(alg, Poly::var(ring, j)))?;
                    Ok(c.to_first_order()?.scalar)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Derivation::new(ring, comps)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let p_op = (0..m)
        .map(|a| restricted_power(alg, &FirstOrder::generator(Poly::one(ring), m, a)))
        .collect::<Result<Vec<_>>>()?;
    Algebroid::new(ring, alg.generators.clone(), bracket, anchor, p_op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn poly(src: &str, ring: &Arc<PolyRing>) -> Poly {
        parse_poly(src, ring).unwrap()
    }

    #[test]
    fn tangent_presentations() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        assert_eq!(t.rank(), 1);
        assert_eq!(t.anchor(0), &Derivation::partial(&r, 0));
        assert!(t.p_op(0).is_zero());
        let r2 = PolyRing::new(5, &["x", "y"]).unwrap();
        let t2 = Algebroid::tangent(&r2).unwrap();
        assert_eq!(t2.rank(), 2);
        assert!(t2.is_abelian());
        let rt = PolyRing::with_rees(3, &["x"], "t").unwrap();
        let tt = Algebroid::tangent(&rt).unwrap();
        assert_eq!(tt.rank(), 1);
        assert!(tt.anchor(0).component(1).is_zero());
    }

    #[test]
    fn validation_examples() {
        let r = PolyRing::new(3, &["x", "y"]).unwrap();
        let cfg = PanelConfig::default();
        let t = Algebroid::tangent(&r).unwrap();
        assert!(validate_algebroid(&t, &cfg).unwrap().all_passed());
        let r1 = PolyRing::new(3, &["x"]).unwrap();
        let h = Algebroid::higgs_trivial(&r1, 1).unwrap();
        assert!(validate_algebroid(&h, &cfg).unwrap().all_passed());

        let zero = Poly::zero(&r1);
        let one = Poly::one(&r1);
        let mut bracket = vec![vec![vec![zero.clone(); 2]; 2]; 2];
        bracket[0][1][0] = one.clone();
        bracket[1][0][0] = one.clone();
        let bad = Algebroid::new(
            &r1,
            vec!["e1".into(), "e2".into()],
            bracket,
            vec![Derivation::zero(&r1); 2],
            vec![FirstOrder::zero(&r1, 2); 2],
        )
        .unwrap();
        let rep = validate_algebroid(&bad, &cfg).unwrap();
        assert!(!rep.passed("antisymmetry"));
    }

    #[test]
    fn p_structure_examples() {
        let cfg = PanelConfig::default();
        let r = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let rep = validate_p_structure(&t, &cfg).unwrap();
        assert!(rep.all_passed(), "{rep}");

        let h = Algebroid::higgs(&r, vec![vec![poly("x^2 + 1", &r)]]).unwrap();
        assert!(validate_p_structure(&h, &cfg).unwrap().all_passed());

        // e^[3] := ∂ instead of ∂^3 = 0
        let broken = Algebroid::new(
            &r,
            vec!["d_x".into()],
            vec![vec![vec![Poly::zero(&r)]]],
            vec![Derivation::partial(&r, 0)],
            vec![FirstOrder::generator(Poly::one(&r), 1, 0)],
        )
        .unwrap();
        let rep = validate_p_structure(&broken, &cfg).unwrap();
        assert!(!rep.passed("ad-axiom"));
        assert!(!rep.passed("δ(D^[p]) = δ(D)^p"));
    }

    #[test]
    fn rees_and_specialization() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let rees = t.rees().unwrap();
        assert!(matches!(rees.rees(), Err(Error::ReesPresent)));
        assert_eq!(rees.anchor(0).component(0).to_string(), "t");
        let one = rees.specialize_t(1).unwrap();
        assert_eq!(*one, *t);
        let zero = rees.specialize_t(0).unwrap();
        assert!(zero.has_zero_anchor() && zero.is_abelian() && zero.p_op(0).is_zero());
        assert!(matches!(t.specialize_t(0), Err(Error::ReesMissing)));
    }

    #[test]
    fn rees_scales_p_operation() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let h = Algebroid::higgs(&r, vec![vec![poly("x", &r)]]).unwrap();
        let rees = h.rees().unwrap();
        assert_eq!(rees.p_op(0).gens[0].to_string(), "x*t^2");
    }

    #[test]
    fn shift_examples() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let shifted = t
            .shift_p_structure(&[FirstOrder::function(poly("x^3", &r), 1)])
            .unwrap();
        assert_eq!(shifted.p_op(0).scalar.to_string(), "x^3");
        let rep = validate_p_structure(&shifted, &PanelConfig::default()).unwrap();
        assert!(rep.all_passed(), "{rep}");
        let same = t.shift_p_structure(&[FirstOrder::zero(&r, 1)]).unwrap();
        assert_eq!(*same, *t);
        let rejected = t.shift_p_structure(&[FirstOrder::function(poly("x", &r), 1)]);
        assert!(matches!(
            rejected,
            Err(Error::ShiftRejected { generator: 0, .. })
        ));
    }

    #[test]
    fn generic_surjectivity() {
        let r = PolyRing::new(3, &["x", "y"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        let (ok, minor) = t.anchor_generic_surjectivity().unwrap();
        assert!(ok);
        assert!(minor.unwrap().is_one());
        let h = Algebroid::higgs_trivial(&r, 2).unwrap();
        assert!(!h.anchor_generic_surjectivity().unwrap().0);
        let rees = t.rees().unwrap();
        let (ok, minor) = rees.anchor_generic_surjectivity().unwrap();
        assert!(ok);
        assert_eq!(minor.unwrap().to_string(), "t^2");
        let r1 = PolyRing::new(3, &["x", "y"]).unwrap();
        let h1 = Algebroid::higgs_trivial(&r1, 1).unwrap();
        assert_eq!(h1.anchor_generic_surjectivity().unwrap(), (false, None));
    }

    #[test]
    fn induced_presentation_round_trip() {
        let r = PolyRing::new(3, &["x", "y"]).unwrap();
        let t = Algebroid::tangent(&r).unwrap();
        assert_eq!(*induced_presentation(&t).unwrap(), *t);
        let rees = t.rees().unwrap();
        assert_eq!(*induced_presentation(&rees).unwrap(), *rees);
    }
}
