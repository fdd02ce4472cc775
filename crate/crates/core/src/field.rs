//! Arithmetic in the prime field `F_p`.
//!
//! Elements are plain `u64` residues in `0..p`. The modulus is capped below
//! `2^31` so that every product of two residues fits in a `u64`.

use std::fmt;

use crate::error::PolyError;

/// Largest accepted modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, PolyError> {
        if p >= MAX_MODULUS || !is_prime(p) {
            return Err(PolyError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Characteristic two is accepted for algebra-only use; descent checks refuse it.
    pub fn is_char_two(&self) -> bool {
        self.p == 2
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Fermat inverse `a^(p-2)`; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    /// The image of the integer `k` in the field.
    pub fn from_usize(&self, k: usize) -> u64 {
        (k as u64) % self.p
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(7).is_ok());
    }

    #[test]
    fn fermat_and_inverses() {
        for p in [2u64, 3, 5, 7, 13] {
            let k = PrimeField::new(p).unwrap();
            for a in 0..p {
                assert_eq!(k.pow(a, p), a);
                if a != 0 {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
                }
            }
            assert_eq!(k.inv(0), None);
        }
    }

    #[test]
    fn signed_reduction() {
        let k = PrimeField::new(5).unwrap();
        assert_eq!(k.from_i64(-1), 4);
        assert_eq!(k.from_i64(12), 2);
        assert_eq!(k.sub(1, 3), 3);
        assert_eq!(k.neg(0), 0);
    }
}
