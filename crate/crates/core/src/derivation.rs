//! Derivations of the coordinate ring, stored by their values on the variables.

use std::fmt;
use std::sync::Arc;

use crate::error::PolyError;
use crate::poly::{same_ring, Poly, PolyRing};

/// `Σ_j c_j ∂_j`, one component per ring variable.
#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    ring: Arc<PolyRing>,
    components: Vec<Poly>,
}

impl Derivation {
    pub fn new(ring: &Arc<PolyRing>, components: Vec<Poly>) -> Result<Self, PolyError> {
        if components.len() != ring.nvars() {
            return Err(PolyError::IndexOutOfRange {
                index: components.len(),
                nvars: ring.nvars(),
            });
        }
        if components.iter().any(|c| !same_ring(c.ring(), ring)) {
            return Err(PolyError::RingMismatch);
        }
        Ok(Self {
            ring: ring.clone(),
            components,
        })
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self {
            ring: ring.clone(),
            components: vec![Poly::zero(ring); ring.nvars()],
        }
    }

    /// The coordinate field `∂_j`.
    pub fn partial(ring: &Arc<PolyRing>, j: usize) -> Self {
        let mut d = Self::zero(ring);
        d.components[j] = Poly::one(ring);
        d
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &Poly {
        &self.components[j]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// `Σ_j ν_j ∂_j f`.
    pub fn apply(&self, f: &Poly) -> Result<Poly, PolyError> {
        if !same_ring(f.ring(), &self.ring) {
            return Err(PolyError::RingMismatch);
        }
        let mut out = Poly::zero(&self.ring);
        for (j, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = f.derive(j);
            if !d.is_zero() {
                out = out + c.checked_mul(&d)?;
            }
        }
        Ok(out)
    }

    /// `ν^k(f)`.
    pub fn iterate(&self, k: usize, f: &Poly) -> Result<Poly, PolyError> {
        let mut v = f.clone();
        for _ in 0..k {
            if v.is_zero() {
                break;
            }
            v = self.apply(&v)?;
        }
        Ok(v)
    }

    /// `ν^p`, again a derivation in characteristic p; it is determined by its
    /// values on the variables.
    pub fn pth_power(&self) -> Result<Self, PolyError> {
        let p = self.ring.p() as usize;
        let components = (0..self.ring.nvars())
            .map(|j| self.iterate(p, &Poly::var(&self.ring, j)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            ring: self.ring.clone(),
            components,
        })
    }

    pub fn scale_by(&self, f: &Poly) -> Result<Self, PolyError> {
        let components = self
            .components
            .iter()
            .map(|c| f.checked_mul(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            ring: self.ring.clone(),
            components,
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            ring: self.ring.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            ring: self.ring.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Lie bracket `[μ, ν](x_j) = μ(ν(x_j)) - ν(μ(x_j))`.
    pub fn bracket(&self, other: &Self) -> Result<Self, PolyError> {
        let components = (0..self.ring.nvars())
            .map(|j| Ok(self.apply(&other.components[j])? - other.apply(&self.components[j])?))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(Self {
            ring: self.ring.clone(),
            components,
        })
    }

    /// Move into `target` after substituting `value` for variable `index`.
    pub fn specialize(&self, index: usize, value: u64, target: &Arc<PolyRing>) -> Self {
        Self {
            ring: target.clone(),
            components: self
                .components
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != index)
                .map(|(_, c)| c.specialize(index, value, target))
                .collect(),
        }
    }

    /// Move into a ring extending this one; new variables get zero components.
    pub fn embed(&self, target: &Arc<PolyRing>) -> Result<Self, PolyError> {
        let mut components = vec![Poly::zero(target); target.nvars()];
        for (j, c) in self.components.iter().enumerate() {
            let k = target
                .index_of(&self.ring.names()[j])
                .ok_or(PolyError::RingMismatch)?;
            components[k] = c.embed(target)?;
        }
        Ok(Self {
            ring: target.clone(),
            components,
        })
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({})*d_{}", c, self.ring.names()[j]))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derivation({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn euler_operator_scales_monomials() {
        let r = PolyRing::new(5, &["x"]).unwrap();
        let x = Poly::var(&r, 0);
        let euler = Derivation::new(&r, vec![x.clone()]).unwrap();
        for m in 0..8u64 {
            let f = x.pow(m).unwrap();
            assert_eq!(euler.apply(&f).unwrap(), f.scale(m));
        }
        assert!(Derivation::zero(&r).apply(&x).unwrap().is_zero());
    }

    #[test]
    fn pth_powers_of_simple_fields() {
        for p in [3u64, 5, 7] {
            let r = PolyRing::new(p, &["x"]).unwrap();
            assert!(Derivation::partial(&r, 0).pth_power().unwrap().is_zero());
            let euler = Derivation::new(&r, vec![Poly::var(&r, 0)]).unwrap();
            assert_eq!(euler.pth_power().unwrap(), euler);
        }
    }

    #[test]
    fn cube_of_x_squared_d() {
        // ν = x^2 ∂: ν(x) = x^2, ν^2(x) = 2x^3, ν^3(x) = 6x^4 = 0 mod 3.
        let r = PolyRing::new(3, &["x"]).unwrap();
        let nu = Derivation::new(&r, vec![parse_poly("x^2", &r).unwrap()]).unwrap();
        let x = Poly::var(&r, 0);
        assert_eq!(nu.iterate(2, &x).unwrap().to_string(), "2*x^3");
        assert!(nu.pth_power().unwrap().is_zero());
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let r = PolyRing::new(3, &["x"]).unwrap();
        let s = PolyRing::new(5, &["x"]).unwrap();
        let d = Derivation::partial(&r, 0);
        assert_eq!(d.apply(&Poly::var(&s, 0)), Err(PolyError::RingMismatch));
    }
}
