//! Dense matrices over a polynomial ring.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{same_ring, Poly, PolyRing};

#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    ring: Arc<PolyRing>,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zero(ring: &Arc<PolyRing>, rows: usize, cols: usize) -> Self {
        Self {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![Poly::zero(ring); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<PolyRing>, n: usize) -> Self {
        let mut out = Self::zero(ring, n, n);
        for i in 0..n {
            out.set(i, i, Poly::one(ring));
        }
        out
    }

    pub fn scalar(f: &Poly, n: usize) -> Self {
        let mut out = Self::zero(f.ring(), n, n);
        for i in 0..n {
            out.set(i, i, f.clone());
        }
        out
    }

    pub fn from_rows(ring: &Arc<PolyRing>, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension(
                "matrix rows have different lengths".into(),
            ));
        }
        let entries: Vec<Poly> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| !same_ring(e.ring(), ring)) {
            return Err(Error::Poly(crate::error::PolyError::RingMismatch));
        }
        Ok(Self {
            ring: ring.clone(),
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn to_rows(&self) -> Vec<Vec<Poly>> {
        self.entries
            .chunks(self.cols.max(1))
            .map(<[Poly]>::to_vec)
            .collect()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        Self {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, mut f: impl FnMut(&Poly) -> Result<Poly>) -> Result<Self> {
        Ok(Self {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(&mut f).collect::<Result<_>>()?,
        })
    }

    /// Move every entry into `target` with `f`.
    pub fn map_into(
        &self,
        target: &Arc<PolyRing>,
        mut f: impl FnMut(&Poly) -> Result<Poly>,
    ) -> Result<Self> {
        Ok(Self {
            ring: target.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(&mut f).collect::<Result<_>>()?,
        })
    }

    pub fn scale(&self, f: &Poly) -> Result<Self> {
        self.map(|e| Ok(f.checked_mul(e)?))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero(&self.ring);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &a.checked_mul(b)?;
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut base = self.clone();
        let mut acc = Self::identity(&self.ring, self.rows);
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

    pub fn trace(&self) -> Poly {
        (0..self.rows.min(self.cols)).fold(Poly::zero(&self.ring), |acc, i| &acc + self.get(i, i))
    }

    /// Determinant by expansion over column subsets, `O(2^n n)` ring products.
    pub fn det(&self) -> Result<Poly> {
        if !self.is_square() {
            return Err(Error::Dimension(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n > 20 {
            return Err(Error::Dimension(format!(
                "rank {n} is too large for a determinant"
            )));
        }
        let mut dp: Vec<Poly> = vec![Poly::zero(&self.ring); 1 << n];
        dp[0] = Poly::one(&self.ring);
        for mask in 0usize..(1 << n) {
            if dp[mask].is_zero() {
                continue;
            }
            let row = mask.count_ones() as usize;
            if row == n {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let a = self.get(row, j);
                if a.is_zero() {
                    continue;
                }
                let mut term = dp[mask].checked_mul(a)?;
                if (mask >> (j + 1)).count_ones() % 2 == 1 {
                    term = -term;
                }
                let next = mask | (1 << j);
                dp[next] = &dp[next] + &term;
            }
        }
        Ok(dp[(1 << n) - 1].clone())
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(Poly::to_string).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMatrix({self})")
    }
}
