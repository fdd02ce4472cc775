//! The enveloping algebra `Λ_H` of an algebroid as an iterated Ore extension.
//!
//! Elements are kept in PBW normal form `Σ f_β e^β` with functions on the
//! left and generators in increasing index order, using only
//!
//! ```text
//! e_a · f   = f · e_a + δ_a(f)
//! e_b · e_a = e_a · e_b + [e_b, e_a]      (b > a)
//! ```

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::algebroid::{Algebroid, FirstOrder};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Exponent vector of a PBW monomial `e_1^{β_1} ⋯ e_m^{β_m}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PbwMonomial(pub SmallVec<[u32; 4]>);

impl PbwMonomial {
    pub fn one(m: usize) -> Self {
        Self(SmallVec::from_elem(0, m))
    }

    pub fn unit(m: usize, a: usize) -> Self {
        let mut out = Self::one(m);
        out.0[a] = 1;
        out
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    fn first_index(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    fn raised(&self, a: usize) -> Self {
        let mut out = self.clone();
        out.0[a] += 1;
        out
    }

    fn lowered(&self, a: usize) -> Self {
        let mut out = self.clone();
        out.0[a] -= 1;
        out
    }

    fn times(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn render(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(names)
            .filter(|(e, _)| **e > 0)
            .map(|(&e, n)| {
                if e == 1 {
                    n.clone()
                } else {
                    format!("{n}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }
}

type Terms = BTreeMap<PbwMonomial, Poly>;

fn add_term(terms: &mut Terms, key: PbwMonomial, value: Poly) {
    if value.is_zero() {
        return;
    }
    match terms.entry(key) {
        Entry::Occupied(mut e) => {
            let sum = e.get() + &value;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
        Entry::Vacant(e) => {
            e.insert(value);
        }
    }
}

/// An element of `Λ_H` in PBW normal form.
#[derive(Clone)]
pub struct Operator {
    alg: Arc<Algebroid>,
    terms: Terms,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg) && self.terms == other.terms
    }
}

impl Eq for Operator {}

impl Operator {
    pub fn zero(alg: &Arc<Algebroid>) -> Self {
        Self {
            alg: alg.clone(),
            terms: Terms::new(),
        }
    }

    pub fn function(alg: &Arc<Algebroid>, f: Poly) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, PbwMonomial::one(alg.rank()), f);
        Self {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn one(alg: &Arc<Algebroid>) -> Self {
        Self::function(alg, Poly::one(alg.ring()))
    }

    pub fn generator(alg: &Arc<Algebroid>, a: usize) -> Self {
        let mut terms = Terms::new();
        terms.insert(PbwMonomial::unit(alg.rank(), a), Poly::one(alg.ring()));
        Self {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn from_first_order(alg: &Arc<Algebroid>, d: &FirstOrder) -> Self {
        let m = alg.rank();
        let mut terms = Terms::new();
        add_term(&mut terms, PbwMonomial::one(m), d.scalar.clone());
        for (a, g) in d.gens.iter().enumerate() {
            add_term(&mut terms, PbwMonomial::unit(m, a), g.clone());
        }
        Self {
            alg: alg.clone(),
            terms,
        }
    }

    /// `Σ f_β e^β` from explicit terms.
    pub fn from_terms<I: IntoIterator<Item = (PbwMonomial, Poly)>>(
        alg: &Arc<Algebroid>,
        terms: I,
    ) -> Self {
        let mut out = Terms::new();
        for (k, v) in terms {
            add_term(&mut out, k, v);
        }
        Self {
            alg: alg.clone(),
            terms: out,
        }
    }

    pub fn algebroid(&self) -> &Arc<Algebroid> {
        &self.alg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Filtration degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(PbwMonomial::degree).max()
    }

    pub fn to_first_order(&self) -> Result<FirstOrder> {
        let m = self.alg.rank();
        let mut out = FirstOrder::zero(self.alg.ring(), m);
        for (k, v) in &self.terms {
            match k.degree() {
                0 => out.scalar = v.clone(),
                1 => out.gens[k.first_index().unwrap()] = v.clone(),
                d => return Err(Error::NotFirstOrder(d)),
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            add_term(&mut terms, k.clone(), v.clone());
        }
        Self {
            alg: self.alg.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    /// `f · self`.
    pub fn left_scale(&self, f: &Poly) -> Result<Self> {
        let mut terms = Terms::new();
        for (k, v) in &self.terms {
            add_term(&mut terms, k.clone(), f.checked_mul(v)?);
        }
        Ok(Self {
            alg: self.alg.clone(),
            terms,
        })
    }

    /// Product in `Λ_H`, reduced to normal form.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if !(Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg) {
            return Err(Error::AlgebroidMismatch);
        }
        let mut engine = Engine::new(&self.alg);
        let terms = engine.product(&self.terms, &other.terms)?;
        Ok(Self {
            alg: self.alg.clone(),
            terms,
        })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other)?.sub(&other.mul(self)?))
    }

    /// `ad(self)^k (target)`.
    pub fn ad_pow(&self, k: usize, target: &Self) -> Result<Self> {
        let mut v = target.clone();
        for _ in 0..k {
            if v.is_zero() {
                break;
            }
            v = self.commutator(&v)?;
        }
        Ok(v)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.alg);
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

    /// First nonzero commutator with a ring variable or generator, if any.
    pub fn centrality_witness(&self) -> Result<Option<String>> {
        let ring = self.alg.ring();
        for j in 0..ring.nvars() {
            let c = self.commutator(&Self::function(&self.alg, Poly::var(ring, j)))?;
            if !c.is_zero() {
                return Ok(Some(format!("[z, {}] = {}", ring.names()[j], c)));
            }
        }
        for a in 0..self.alg.rank() {
            let c = self.commutator(&Self::generator(&self.alg, a))?;
            if !c.is_zero() {
                return Ok(Some(format!(
                    "[z, {}] = {}",
                    self.alg.generator_names()[a],
                    c
                )));
            }
        }
        Ok(None)
    }

    pub fn is_central(&self) -> Result<bool> {
        Ok(self.centrality_witness()?.is_none())
    }

    /// Top-degree part, read in `Sym(H)`.
    pub fn symbol_top(&self) -> Symbol {
        let d = self.degree().unwrap_or(0);
        Symbol {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.degree() == d)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

fn render_terms(alg: &Algebroid, terms: &Terms, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    let mut keys: Vec<&PbwMonomial> = terms.keys().collect();
    keys.sort_by(|a, b| b.degree().cmp(&a.degree()).then(b.cmp(a)));
    let parts: Vec<String> = keys
        .into_iter()
        .map(|k| {
            let c = &terms[k];
            let mono = k.render(alg.generator_names());
            if mono.is_empty() {
                if c.num_terms() == 1 {
                    c.to_string()
                } else {
                    format!("({c})")
                }
            } else if c.is_one() {
                mono
            } else if c.num_terms() == 1 {
                format!("{c}*{mono}")
            } else {
                format!("({c})*{mono}")
            }
        })
        .collect();
    write!(f, "{}", parts.join(" + "))
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_terms(&self.alg, &self.terms, f)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({self})")
    }
}

/// A homogeneous-or-not element of `Sym(H) = gr Λ_H`, a commutative
/// polynomial ring in the generators over the chart ring.
#[derive(Clone)]
pub struct Symbol {
    alg: Arc<Algebroid>,
    terms: Terms,
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Symbol {}

impl Symbol {
    pub fn from_first_order(alg: &Arc<Algebroid>, d: &FirstOrder) -> Self {
        let m = alg.rank();
        let mut terms = Terms::new();
        for (a, g) in d.gens.iter().enumerate() {
            add_term(&mut terms, PbwMonomial::unit(m, a), g.clone());
        }
        Self {
            alg: alg.clone(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Terms::new();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &other.terms {
                add_term(&mut terms, k1.times(k2), v1.checked_mul(v2)?);
            }
        }
        Ok(Self {
            alg: self.alg.clone(),
            terms,
        })
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let m = self.alg.rank();
        let mut acc = Self {
            alg: self.alg.clone(),
            terms: Terms::from([(PbwMonomial::one(m), Poly::one(self.alg.ring()))]),
        };
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_terms(&self.alg, &self.terms, f)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

/// Normal-form multiplication with memoised generator moves.
struct Engine<'a> {
    alg: &'a Algebroid,
    gen_cache: HashMap<(usize, PbwMonomial), Rc<Terms>>,
    limit: usize,
}

impl<'a> Engine<'a> {
    fn new(alg: &'a Algebroid) -> Self {
        Self {
            alg,
            gen_cache: HashMap::new(),
            limit: alg.term_limit(),
        }
    }

    fn guard(&self, terms: &Terms) -> Result<()> {
        if terms.len() > self.limit {
            return Err(Error::TermLimit {
                terms: terms.len(),
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// `e_a · e^δ` in normal form.
    fn gen_mono(&mut self, a: usize, delta: &PbwMonomial) -> Result<Rc<Terms>> {
        let one = || Poly::one(self.alg.ring());
        let b = match delta.first_index() {
            Some(b) if b < a && !self.alg.is_abelian() => b,
            _ => return Ok(Rc::new(Terms::from([(delta.raised(a), one())]))),
        };
        let key = (a, delta.clone());
        if let Some(hit) = self.gen_cache.get(&key) {
            return Ok(hit.clone());
        }
        // e_a e_b e^rest = e_b (e_a e^rest) + Σ_k c_ab^k e_k e^rest
        let rest = delta.lowered(b);
        let inner = self.gen_mono(a, &rest)?;
        let mut out = self.left_mul_gen(b, &inner)?;
        for k in 0..self.alg.rank() {
            let c = &self.alg.bracket_coeffs(a, b)[k];
            if c.is_zero() {
                continue;
            }
            let moved = self.gen_mono(k, &rest)?;
            for (mono, h) in moved.iter() {
                add_term(&mut out, mono.clone(), c.checked_mul(h)?);
            }
        }
        self.guard(&out)?;
        let out = Rc::new(out);
        self.gen_cache.insert(key, out.clone());
        Ok(out)
    }

    /// `e_a · Y`.
    fn left_mul_gen(&mut self, a: usize, y: &Terms) -> Result<Terms> {
        let anchor = self.alg.anchor(a).clone();
        let mut out = Terms::new();
        for (delta, h) in y {
            let moved = self.gen_mono(a, delta)?;
            for (mono, g) in moved.iter() {
                add_term(&mut out, mono.clone(), h.checked_mul(g)?);
            }
            if !anchor.is_zero() {
                add_term(&mut out, delta.clone(), anchor.apply(h)?);
            }
        }
        self.guard(&out)?;
        Ok(out)
    }

    fn product(&mut self, x: &Terms, y: &Terms) -> Result<Terms> {
        let mut cache: HashMap<PbwMonomial, Rc<Terms>> = HashMap::new();
        let y = Rc::new(y.clone());
        let mut out = Terms::new();
        for (beta, f) in x {
            let moved = self.monomial_times(beta, &y, &mut cache)?;
            for (mono, g) in moved.iter() {
                add_term(&mut out, mono.clone(), f.checked_mul(g)?);
            }
            self.guard(&out)?;
        }
        Ok(out)
    }

    /// `e^β · Y`, peeling off the smallest generator.
    fn monomial_times(
        &mut self,
        beta: &PbwMonomial,
        y: &Rc<Terms>,
        cache: &mut HashMap<PbwMonomial, Rc<Terms>>,
    ) -> Result<Rc<Terms>> {
        let Some(i) = beta.first_index() else {
            return Ok(y.clone());
        };
        if let Some(hit) = cache.get(beta) {
            return Ok(hit.clone());
        }
        let rest = self.monomial_times(&beta.lowered(i), y, cache)?;
        let out = Rc::new(self.left_mul_gen(i, &rest)?);
        cache.insert(beta.clone(), out.clone());
        Ok(out)
    }
}

/// The Lie polynomials `s_1, …, s_{p-1}` with `i·s_i` the coefficient of
/// `τ^{i-1}` in `ad(τx + y)^{p-1}(x)`.
pub fn lie_polynomials(x: &Operator, y: &Operator) -> Result<Vec<Operator>> {
    let alg = x.algebroid();
    if !Arc::ptr_eq(alg, y.algebroid()) && **alg != **y.algebroid() {
        return Err(Error::AlgebroidMismatch);
    }
    for op in [x, y] {
        let d = op.degree().unwrap_or(0);
        if d > 1 {
            return Err(Error::NotFirstOrder(d));
        }
    }
    let field = alg.ring().field();
    let p = alg.p() as usize;
    let mut graded = vec![x.clone()];
    for _ in 0..p - 1 {
        let mut next = vec![Operator::zero(alg); graded.len() + 1];
        for (j, c) in graded.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[j] = next[j].add(&y.commutator(c)?);
            next[j + 1] = next[j + 1].add(&x.commutator(c)?);
        }
        graded = next;
    }
    let mut out = Vec::with_capacity(p - 1);
    for i in 1..p {
        let inv = field.inv(field.from_usize(i)).expect("i < p is a unit");
        out.push(graded[i - 1].left_scale(&Poly::constant(alg.ring(), inv))?);
    }
    Ok(out)
}

/// Sum of the Lie polynomials `Σ_i s_i(x, y)`.
pub fn lie_polynomial_sum(x: &Operator, y: &Operator) -> Result<Operator> {
    let mut acc = Operator::zero(x.algebroid());
    for s in lie_polynomials(x, y)? {
        acc = acc.add(&s);
    }
    Ok(acc)
}

/// The restricted power on `Λ_1 = O ⊕ H` induced by the algebroid:
/// `(g e_a)^[p] = g^p e_a^[p] + δ_{g e_a}^{p-1}(g) e_a`, extended over sums with
/// the Lie polynomials, and `(D + f)^[p] = D^[p] + f^p + δ_D^{p-1}(f)`.
pub fn restricted_power(alg: &Arc<Algebroid>, d: &FirstOrder) -> Result<FirstOrder> {
    let m = alg.rank();
    let p = alg.p();
    let ring = alg.ring();
    let mut result = FirstOrder::zero(ring, m);
    let mut acc: Option<Operator> = None;
    for (a, g) in d.gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let single = FirstOrder::generator(g.clone(), m, a);
        let delta = alg.anchor(a).scale_by(g)?;
        let corr = delta.iterate(p as usize - 1, g)?;
        let mut power = alg.p_op(a).scale(&g.pow(p)?)?;
        power.gens[a] = &power.gens[a] + &corr;
        result = result.add(&power);
        let term = Operator::from_first_order(alg, &single);
        acc = Some(match acc {
            None => term,
            Some(prev) => {
                let s = lie_polynomial_sum(&prev, &term)?;
                result = result.add(&s.to_first_order()?);
                prev.add(&term)
            }
        });
    }
    if !d.scalar.is_zero() {
        let delta = alg.anchor_of(d)?;
        let f = &d.scalar;
        result.scalar = &result.scalar + &(&f.pow(p)? + &delta.iterate(p as usize - 1, f)?);
    }
    Ok(result)
}

/// `ι(D) = D^p - D^[p]`, which must be central in `Λ`.
pub fn iota(alg: &Arc<Algebroid>, d: &FirstOrder) -> Result<Operator> {
    let op = Operator::from_first_order(alg, d);
    let z = op
        .pow(alg.p())?
        .sub(&Operator::from_first_order(alg, &restricted_power(alg, d)?));
    if let Some(w) = z.centrality_witness()? {
        return Err(Error::NotCentral(format!(
            "ι({}) = {} is not central: {}",
            alg.display_first_order(d),
            z,
            w
        )));
    }
    Ok(z)
}
