//! Sparse multivariate polynomials over `F_p`.
//!
//! A [`Poly`] is a map from exponent vectors to nonzero residues. Zero
//! coefficients are never stored, so structural equality is equality of
//! polynomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::PolyError;
use crate::field::PrimeField;

/// Default cap on any single exponent.
pub const DEFAULT_DEGREE_BOUND: u32 = 1_000_000;

/// How a ring variable behaves under Frobenius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// A chart coordinate `x_j`; Frobenius raises it to the p-th power.
    Coordinate,
    /// The Rees parameter `t`; Frobenius acts as the identity on it.
    Rees,
    /// A formal bookkeeping variable (dual variables, the spectral parameter).
    Formal,
}

/// The coordinate ring `F_p[x_1..x_n]` of an affine chart, optionally with a
/// Rees variable and formal variables appended.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: PrimeField,
    names: Vec<String>,
    kinds: Vec<VarKind>,
    degree_bound: u32,
}

impl PolyRing {
    /// A chart ring with the given coordinate names.
    pub fn new<S: AsRef<str>>(p: u64, coordinates: &[S]) -> Result<Arc<Self>, PolyError> {
        let vars: Vec<(String, VarKind)> = coordinates
            .iter()
            .map(|s| (s.as_ref().to_string(), VarKind::Coordinate))
            .collect();
        Self::with_vars(PrimeField::new(p)?, vars, DEFAULT_DEGREE_BOUND)
    }

    /// A chart ring with a distinguished Rees variable appended.
    pub fn with_rees<S: AsRef<str>>(
        p: u64,
        coordinates: &[S],
        rees: &str,
    ) -> Result<Arc<Self>, PolyError> {
        let mut vars: Vec<(String, VarKind)> = coordinates
            .iter()
            .map(|s| (s.as_ref().to_string(), VarKind::Coordinate))
            .collect();
        vars.push((rees.to_string(), VarKind::Rees));
        Self::with_vars(PrimeField::new(p)?, vars, DEFAULT_DEGREE_BOUND)
    }

    pub fn with_vars(
        field: PrimeField,
        vars: Vec<(String, VarKind)>,
        degree_bound: u32,
    ) -> Result<Arc<Self>, PolyError> {
        if !vars.iter().any(|(_, k)| *k == VarKind::Coordinate) {
            return Err(PolyError::NoCoordinates);
        }
        let mut names = Vec::with_capacity(vars.len());
        let mut kinds = Vec::with_capacity(vars.len());
        for (name, kind) in vars {
            if !is_identifier(&name) || names.contains(&name) {
                return Err(PolyError::DuplicateVariable(name));
            }
            if kind == VarKind::Rees && kinds.contains(&VarKind::Rees) {
                return Err(PolyError::DuplicateVariable(name));
            }
            names.push(name);
            kinds.push(kind);
        }
        Ok(Arc::new(Self {
            field,
            names,
            kinds,
            degree_bound,
        }))
    }

    /// Same ring with a different exponent cap.
    pub fn with_degree_bound(&self, bound: u32) -> Arc<Self> {
        Arc::new(Self {
            degree_bound: bound,
            ..self.clone()
        })
    }

    /// Append variables, keeping the existing ones (and their indices) in front.
    pub fn extend(&self, extra: &[(String, VarKind)]) -> Result<Arc<Self>, PolyError> {
        let mut vars: Vec<(String, VarKind)> = self
            .names
            .iter()
            .cloned()
            .zip(self.kinds.iter().copied())
            .collect();
        vars.extend(extra.iter().cloned());
        Self::with_vars(self.field, vars, self.degree_bound)
    }

    /// Remove the variable at `index`.
    pub fn without(&self, index: usize) -> Result<Arc<Self>, PolyError> {
        self.check_index(index)?;
        let vars = self
            .names
            .iter()
            .cloned()
            .zip(self.kinds.iter().copied())
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, v)| v)
            .collect();
        Self::with_vars(self.field, vars, self.degree_bound)
    }

    /// A name not yet used in this ring, derived from `stem`.
    pub fn fresh_name(&self, stem: &str) -> String {
        let mut name = stem.to_string();
        while self.names.contains(&name) {
            name.push('_');
        }
        name
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.field.p()
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self, index: usize) -> VarKind {
        self.kinds[index]
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn rees_index(&self) -> Option<usize> {
        self.kinds.iter().position(|k| *k == VarKind::Rees)
    }

    /// Indices of chart coordinates, in ring order.
    pub fn coordinate_indices(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.kinds[i] == VarKind::Coordinate)
            .collect()
    }

    pub fn check_index(&self, index: usize) -> Result<(), PolyError> {
        if index < self.nvars() {
            Ok(())
        } else {
            Err(PolyError::IndexOutOfRange {
                index,
                nvars: self.nvars(),
            })
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub SmallVec<[u32; 6]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, index: usize, exp: u32) -> Self {
        let mut m = Self::one(nvars);
        m.0[index] = exp;
        m
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    /// Graded-lex comparison, used for rendering (largest first).
    pub fn cmp_grlex(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A polynomial in a [`PolyRing`].
#[derive(Clone)]
pub struct Poly {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Monomial, u64>,
}

pub(crate) fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Poly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: u64) -> Self {
        let c = ring.field().reduce(c);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Monomial::one(ring.nvars()), c);
        }
        Self {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn from_i64(ring: &Arc<PolyRing>, c: i64) -> Self {
        Self::constant(ring, ring.field().from_i64(c))
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, 1)
    }

    /// The variable with the given index.
    pub fn var(ring: &Arc<PolyRing>, index: usize) -> Self {
        Self::monomial(ring, Monomial::var(ring.nvars(), index, 1), 1)
    }

    pub fn var_named(ring: &Arc<PolyRing>, name: &str) -> Option<Self> {
        ring.index_of(name).map(|i| Self::var(ring, i))
    }

    pub fn monomial(ring: &Arc<PolyRing>, mono: Monomial, coeff: u64) -> Self {
        debug_assert_eq!(mono.0.len(), ring.nvars());
        let c = ring.field().reduce(coeff);
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(mono, c);
        }
        Self {
            ring: ring.clone(),
            terms,
        }
    }

    /// Build from raw terms, summing duplicates and dropping zeros.
    pub fn from_terms<I>(ring: &Arc<PolyRing>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u64)>,
    {
        let k = ring.field();
        let mut out = Self::zero(ring);
        for (m, c) in terms {
            out.add_term(m, k.reduce(c));
        }
        out
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn field(&self) -> PrimeField {
        self.ring.field()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, &c)| c == 1 && m.0.iter().all(|&e| e == 0))
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, &c) = self.terms.iter().next().unwrap();
                m.0.iter().all(|&e| e == 0).then_some(c)
            }
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, mono: &Monomial) -> u64 {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Degree in one variable; `None` for zero.
    pub fn degree_in(&self, index: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[index]).max()
    }

    fn add_term(&mut self, mono: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let k = self.ring.field();
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = k.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn assert_ring(&self, other: &Self) {
        assert!(
            same_ring(&self.ring, &other.ring),
            "polynomial ring mismatch"
        );
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(PolyError::RingMismatch);
        }
        Ok(self + other)
    }

    pub fn scale(&self, c: u64) -> Self {
        let k = self.field();
        let c = k.reduce(c);
        if c == 0 {
            return Self::zero(&self.ring);
        }
        Self {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &v)| (m.clone(), k.mul(v, c)))
                .collect(),
        }
    }

    /// Product with the degree bound enforced.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(PolyError::RingMismatch);
        }
        let k = self.field();
        let bound = self.ring.degree_bound();
        let mut out = Self::zero(&self.ring);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let mut exps = SmallVec::with_capacity(ma.0.len());
                for (a, b) in ma.0.iter().zip(mb.0.iter()) {
                    let e = *a as u64 + *b as u64;
                    if e > bound as u64 {
                        return Err(PolyError::DegreeBound { degree: e, bound });
                    }
                    exps.push(e as u32);
                }
                out.add_term(Monomial(exps), k.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self, PolyError> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn derive(&self, index: usize) -> Self {
        let k = self.field();
        let mut out = Self::zero(&self.ring);
        for (m, &c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let factor = k.reduce(e as u64);
            if factor == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[index] = e - 1;
            out.add_term(m2, k.mul(c, factor));
        }
        out
    }

    /// Substitute the constant `value` for variable `index` (the variable stays in the ring).
    pub fn substitute(&self, index: usize, value: u64) -> Self {
        let k = self.field();
        let mut out = Self::zero(&self.ring);
        for (m, &c) in &self.terms {
            let e = m.0[index];
            let mut m2 = m.clone();
            m2.0[index] = 0;
            out.add_term(m2, k.mul(c, k.pow(value, e as u64)));
        }
        out
    }

    /// Substitute `value` for variable `index` and move the result into `target`,
    /// which must be this ring with that variable removed.
    pub fn specialize(&self, index: usize, value: u64, target: &Arc<PolyRing>) -> Self {
        let k = self.field();
        let mut out = Self::zero(target);
        for (m, &c) in &self.terms {
            let e = m.0[index];
            let exps: SmallVec<[u32; 6]> =
                m.0.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != index)
                    .map(|(_, &e)| e)
                    .collect();
            out.add_term(Monomial(exps), k.mul(c, k.pow(value, e as u64)));
        }
        out
    }

    /// Move into a ring whose variables extend this one's (matched by name).
    pub fn embed(&self, target: &Arc<PolyRing>) -> Result<Self, PolyError> {
        if same_ring(&self.ring, target) {
            return Ok(self.clone());
        }
        let map = self
            .ring
            .names()
            .iter()
            .map(|n| {
                target
                    .index_of(n)
                    .ok_or_else(|| PolyError::UnknownVariable {
                        name: n.clone(),
                        pos: 0,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if target.p() != self.ring.p() {
            return Err(PolyError::RingMismatch);
        }
        let n = target.nvars();
        let terms = self.terms.iter().map(|(m, &c)| {
            let mut e = Monomial::one(n);
            for (i, &j) in map.iter().enumerate() {
                e.0[j] = m.0[i];
            }
            (e, c)
        });
        Ok(Self::from_terms(target, terms))
    }

    /// Inverse of [`Poly::embed`]: fails if a variable missing from `target` occurs.
    pub fn restrict(&self, target: &Arc<PolyRing>) -> Result<Self, PolyError> {
        if same_ring(&self.ring, target) {
            return Ok(self.clone());
        }
        let map = target
            .names()
            .iter()
            .map(|n| {
                self.ring
                    .index_of(n)
                    .ok_or_else(|| PolyError::UnknownVariable {
                        name: n.clone(),
                        pos: 0,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::zero(target);
        for (m, &c) in &self.terms {
            let kept: u64 = map.iter().map(|&j| m.0[j] as u64).sum();
            if kept != m.total_degree() {
                let missing = (0..self.ring.nvars())
                    .find(|i| !map.contains(i) && m.0[*i] > 0)
                    .unwrap();
                return Err(PolyError::UnknownVariable {
                    name: self.ring.names()[missing].clone(),
                    pos: 0,
                });
            }
            let e = Monomial(map.iter().map(|&j| m.0[j]).collect());
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Split by the exponents of the listed variables: each key is the exponent
    /// tuple of those variables, each value the remaining coefficient (with
    /// those variables set to exponent 0).
    pub fn split_by(&self, indices: &[usize]) -> BTreeMap<Vec<u32>, Poly> {
        let mut out: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let key: Vec<u32> = indices.iter().map(|&i| m.0[i]).collect();
            let mut rest = m.clone();
            for &i in indices {
                rest.0[i] = 0;
            }
            out.entry(key)
                .or_insert_with(|| Poly::zero(&self.ring))
                .add_term(rest, c);
        }
        out
    }

    /// Frobenius pullback: coordinate exponents are multiplied by p; Rees and
    /// formal exponents and coefficients are unchanged (`a^p = a` on `F_p`).
    pub fn frobenius_pullback(&self) -> Result<Self, PolyError> {
        let p = self.ring.p();
        let bound = self.ring.degree_bound() as u64;
        let coords = self.ring.coordinate_indices();
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            let mut m2 = m.clone();
            for &i in &coords {
                let e = m2.0[i] as u64 * p;
                if e > bound {
                    return Err(PolyError::DegreeBound {
                        degree: e,
                        bound: bound as u32,
                    });
                }
                m2.0[i] = e as u32;
            }
            terms.insert(m2, c);
        }
        Ok(Self {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// Frobenius descent: divides coordinate exponents by p when all are
    /// divisible, otherwise reports the offending terms.
    pub fn pth_root_descend(&self) -> Descent {
        let p = self.ring.p() as u32;
        let coords = self.ring.coordinate_indices();
        let offending: Vec<(Monomial, u64)> = self
            .terms
            .iter()
            .filter(|(m, _)| coords.iter().any(|&i| m.0[i] % p != 0))
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        if !offending.is_empty() {
            return Descent::NotDescendable(NotDescendable {
                ring: self.ring.clone(),
                terms: offending,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| {
                let mut m2 = m.clone();
                for &i in &coords {
                    m2.0[i] /= p;
                }
                (m2, c)
            })
            .collect();
        Descent::Descended(Self {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// Apply `f` to every coefficient-monomial pair; used by structural maps.
    pub fn map_terms<F>(&self, target: &Arc<PolyRing>, mut f: F) -> Self
    where
        F: FnMut(&Monomial, u64) -> Option<(Monomial, u64)>,
    {
        let mut out = Self::zero(target);
        for (m, &c) in &self.terms {
            if let Some((m2, c2)) = f(m, c) {
                out.add_term(m2, c2 % target.p());
            }
        }
        out
    }

    /// Render one monomial in the polynomial grammar.
    pub fn format_monomial(ring: &PolyRing, m: &Monomial, coeff: u64) -> String {
        let mut factors: Vec<String> = Vec::new();
        let is_one = m.0.iter().all(|&e| e == 0);
        if coeff != 1 || is_one {
            factors.push(coeff.to_string());
        }
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(ring.names()[i].clone()),
                _ => factors.push(format!("{}^{}", ring.names()[i], e)),
            }
        }
        factors.join("*")
    }
}

/// Outcome of [`Poly::pth_root_descend`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descent {
    Descended(Poly),
    NotDescendable(NotDescendable),
}

impl Descent {
    pub fn descended(self) -> Option<Poly> {
        match self {
            Descent::Descended(p) => Some(p),
            Descent::NotDescendable(_) => None,
        }
    }

    pub fn is_descended(&self) -> bool {
        matches!(self, Descent::Descended(_))
    }
}

/// The monomials blocking Frobenius descent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotDescendable {
    ring: Arc<PolyRing>,
    pub terms: Vec<(Monomial, u64)>,
}

impl NotDescendable {
    /// The offending terms as a polynomial.
    pub fn witness(&self) -> Poly {
        Poly::from_terms(&self.ring, self.terms.iter().cloned())
    }

    /// Offending monomials rendered without coefficients.
    pub fn monomials(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(m, _)| Poly::format_monomial(&self.ring, m, 1))
            .collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Monomial, &u64)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.cmp_grlex(a.0));
        let rendered: Vec<String> = terms
            .into_iter()
            .map(|(m, &c)| Self::format_monomial(&self.ring, m, c))
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.assert_ring(rhs);
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.assert_ring(rhs);
        let k = self.field();
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), k.neg(c));
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let k = self.field();
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.clone(), k.neg(c)))
                .collect(),
        }
    }
}

/// Panics if the degree bound is exceeded; use [`Poly::checked_mul`] to recover.
impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomial product")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &'a Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -(&self)
    }
}
