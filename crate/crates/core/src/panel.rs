//! Test panels: every monomial up to a degree plus seeded random polynomials.
//!
//! The identities checked against a panel are polynomial in the coefficients
//! of the sampled functions, so a panel that spans all low-degree monomials
//! and a handful of dense random elements is a strong certificate.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{Monomial, Poly, PolyRing, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PanelConfig {
    pub seed: u64,
    /// Number of random samples.
    pub trials: usize,
    /// Maximal total degree of panel functions.
    pub degree: u32,
}

impl Default for PanelConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 8,
            degree: 3,
        }
    }
}

impl PanelConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Monomials in the non-formal variables of total degree `<= degree`,
    /// followed by `trials` random polynomials.
    pub fn functions(&self, ring: &Arc<PolyRing>) -> Vec<Poly> {
        let mut out = all_monomials(ring, self.degree);
        let mut rng = self.rng();
        for _ in 0..self.trials {
            out.push(random_poly(&mut rng, ring, self.degree, 4));
        }
        out
    }
}

fn chart_indices(ring: &PolyRing) -> Vec<usize> {
    (0..ring.nvars())
        .filter(|&i| ring.kind(i) != VarKind::Formal)
        .collect()
}

/// All monomials of total degree `<= degree` in coordinates and the Rees variable.
pub fn all_monomials(ring: &Arc<PolyRing>, degree: u32) -> Vec<Poly> {
    let vars = chart_indices(ring);
    let mut out = Vec::new();
    let mut exps = vec![0u32; vars.len()];
    fn rec(
        ring: &Arc<PolyRing>,
        vars: &[usize],
        exps: &mut Vec<u32>,
        pos: usize,
        left: u32,
        out: &mut Vec<Poly>,
    ) {
        if pos == vars.len() {
            let mut m = Monomial::one(ring.nvars());
            for (k, &i) in vars.iter().enumerate() {
                m.0[i] = exps[k];
            }
            out.push(Poly::monomial(ring, m, 1));
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(ring, vars, exps, pos + 1, left - e, out);
        }
        exps[pos] = 0;
    }
    rec(ring, &vars, &mut exps, 0, degree, &mut out);
    out
}

/// A random polynomial with at most `max_terms` terms of total degree `<= degree`
/// in the chart variables.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    ring: &Arc<PolyRing>,
    degree: u32,
    max_terms: usize,
) -> Poly {
    let vars = chart_indices(ring);
    let p = ring.p();
    let nterms = rng.gen_range(1..=max_terms.max(1));
    let terms = (0..nterms).map(|_| {
        let mut m = Monomial::one(ring.nvars());
        let mut left = degree;
        for &i in &vars {
            let e = rng.gen_range(0..=left);
            m.0[i] = e;
            left -= e;
        }
        // shuffle which variable gets the large exponent
        if vars.len() > 1 && rng.gen_bool(0.5) {
            let (a, b) = (vars[0], vars[vars.len() - 1]);
            m.0.swap(a, b);
        }
        (m, rng.gen_range(0..p))
    });
    Poly::from_terms(ring, terms)
}

/// A random nonzero field element.
pub fn random_unit<R: Rng>(rng: &mut R, ring: &PolyRing) -> u64 {
    rng.gen_range(1..ring.p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_panel_counts() {
        let r = PolyRing::new(3, &["x", "y"]).unwrap();
        // number of monomials of degree <= 3 in 2 variables is C(5,2) = 10
        assert_eq!(all_monomials(&r, 3).len(), 10);
        let r1 = PolyRing::with_rees(3, &["x"], "t").unwrap();
        assert_eq!(all_monomials(&r1, 2).len(), 6);
    }

    #[test]
    fn panels_are_deterministic() {
        let r = PolyRing::new(5, &["x", "y"]).unwrap();
        let cfg = PanelConfig {
            seed: 7,
            trials: 5,
            degree: 3,
        };
        assert_eq!(cfg.functions(&r), cfg.functions(&r));
    }
}
