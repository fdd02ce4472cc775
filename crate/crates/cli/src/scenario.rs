//! Scenario files: JSON documents describing an algebroid, an optional
//! module and an optional shift of the p-structure.

use std::path::Path;
use std::sync::Arc;

use pcurv_core::{
    parse_poly, Algebroid, Derivation, FirstOrder, LambdaModule, Poly, PolyMatrix, PolyRing,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub p: u64,
    pub coordinates: Vec<String>,
    /// Work over `O[t]` with the Rees deformation of the algebroid.
    #[serde(default)]
    pub rees: bool,
    pub algebroid: AlgebroidSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Some Hitchin coefficient is known not to descend.
    NotDescendable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `T_X` with basis `∂_j` and `∂_j^[p] = 0`.
    Tangent,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    /// `bracket[a][b][c]`: coefficient of `e_c` in `[e_a, e_b]`; omitted means abelian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<Vec<Vec<Vec<String>>>>,
    /// `anchor[a][j]`: coefficient of `∂_j` in `δ(e_a)`; omitted means zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<Vec<String>>>,
    /// `p_op[a][b]`: coefficient of `e_b` in `e_a^[p]`; omitted means zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_op: Option<Vec<Vec<String>>>,
    /// Function part of `e_a^[p]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_op_scalar: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub rank: usize,
    /// One `rank x rank` connection matrix per generator.
    pub matrices: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    /// `φ(e_a)`, one per generator.
    pub phi: Vec<ShiftValue>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftValue {
    #[serde(default = "zero_string")]
    pub scalar: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<String>>,
}

fn zero_string() -> String {
    "0".into()
}

/// A scenario with every polynomial parsed and every structure constructed.
pub struct Built {
    pub scenario: Scenario,
    pub ring: Arc<pcurv_core::PolyRing>,
    pub algebroid: Arc<Algebroid>,
    pub module: Option<Arc<LambdaModule>>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text).map_err(|e| e.in_file(path))
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| CliError::Json {
            file: None,
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if sc.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                sc.schema_version
            )));
        }
        Ok(sc)
    }

    pub fn build(self) -> Result<Built, CliError> {
        let base = PolyRing::new(self.p, &self.coordinates)
            .map_err(|e| CliError::field("coordinates", e))?;
        let mut alg = self.algebroid.build(&base)?;
        if let Some(shift) = &self.shift {
            let phi = shift.build(&alg)?;
            alg = alg
                .shift_p_structure(&phi)
                .map_err(|e| CliError::Structure(e.to_string()))?;
        }
        if self.rees {
            alg = alg.rees().map_err(|e| CliError::Structure(e.to_string()))?;
        }
        let ring = alg.ring().clone();
        let module = match &self.module {
            None => None,
            Some(m) => Some(Arc::new(m.build(&alg)?)),
        };
        Ok(Built {
            scenario: self,
            ring,
            algebroid: alg,
            module,
        })
    }
}

fn parse_at(
    src: &str,
    ring: &Arc<PolyRing>,
    path: impl FnOnce() -> String,
) -> Result<Poly, CliError> {
    parse_poly(src, ring).map_err(|e| CliError::field(path(), e))
}

fn expect_len<T>(items: &[T], n: usize, path: &str) -> Result<(), CliError> {
    if items.len() != n {
        return Err(CliError::Schema(format!(
            "{path}: expected {n} entries, found {}",
            items.len()
        )));
    }
    Ok(())
}

impl AlgebroidSpec {
    fn build(&self, ring: &Arc<PolyRing>) -> Result<Arc<Algebroid>, CliError> {
        if let Some(Preset::Tangent) = self.preset {
            let tables = self.bracket.is_some()
                || self.anchor.is_some()
                || self.p_op.is_some()
                || self.p_op_scalar.is_some()
                || self.generators.is_some();
            if tables {
                return Err(CliError::Schema(
                    "algebroid: a preset cannot be combined with tables".into(),
                ));
            }
            if let Some(r) = self.rank {
                expect_len(&vec![(); r], ring.nvars(), "algebroid.rank")?;
            }
            return Algebroid::tangent(ring).map_err(|e| CliError::Structure(e.to_string()));
        }
        let m = match (self.rank, &self.generators) {
            (Some(r), _) => r,
            (None, Some(g)) => g.len(),
            (None, None) => return Err(CliError::Schema("algebroid: rank is required".into())),
        };
        if m == 0 {
            return Err(CliError::Schema("algebroid.rank must be positive".into()));
        }
        let generators = match &self.generators {
            Some(g) => {
                expect_len(g, m, "algebroid.generators")?;
                g.clone()
            }
            None => (1..=m).map(|a| format!("e{a}")).collect(),
        };
        let n = ring.nvars();
        let zero = Poly::zero(ring);
        let bracket = match &self.bracket {
            None => vec![vec![vec![zero.clone(); m]; m]; m],
            Some(t) => {
                expect_len(t, m, "algebroid.bracket")?;
                let mut out = Vec::with_capacity(m);
                for (a, row) in t.iter().enumerate() {
                    expect_len(row, m, &format!("algebroid.bracket[{a}]"))?;
                    let mut r = Vec::with_capacity(m);
                    for (b, cell) in row.iter().enumerate() {
                        expect_len(cell, m, &format!("algebroid.bracket[{a}][{b}]"))?;
                        r.push(
                            cell.iter()
                                .enumerate()
                                .map(|(c, s)| {
                                    parse_at(s, ring, || {
                                        format!("algebroid.bracket[{a}][{b}][{c}]")
                                    })
                                })
                                .collect::<Result<Vec<_>, _>>()?,
                        );
                    }
                    out.push(r);
                }
                out
            }
        };
        let anchor = match &self.anchor {
            None => vec![Derivation::zero(ring); m],
            Some(t) => {
                expect_len(t, m, "algebroid.anchor")?;
                t.iter()
                    .enumerate()
                    .map(|(a, row)| {
                        expect_len(row, n, &format!("algebroid.anchor[{a}]"))?;
                        let comps = row
                            .iter()
                            .enumerate()
                            .map(|(j, s)| {
                                parse_at(s, ring, || format!("algebroid.anchor[{a}][{j}]"))
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        Derivation::new(ring, comps)
                            .map_err(|e| CliError::field(format!("algebroid.anchor[{a}]"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let mut p_op = vec![FirstOrder::zero(ring, m); m];
        if let Some(t) = &self.p_op {
            expect_len(t, m, "algebroid.p_op")?;
            for (a, row) in t.iter().enumerate() {
                expect_len(row, m, &format!("algebroid.p_op[{a}]"))?;
                for (b, s) in row.iter().enumerate() {
                    p_op[a].gens[b] = parse_at(s, ring, || format!("algebroid.p_op[{a}][{b}]"))?;
                }
            }
        }
        if let Some(t) = &self.p_op_scalar {
            expect_len(t, m, "algebroid.p_op_scalar")?;
            for (a, s) in t.iter().enumerate() {
                p_op[a].scalar = parse_at(s, ring, || format!("algebroid.p_op_scalar[{a}]"))?;
            }
        }
        Algebroid::new(ring, generators, bracket, anchor, p_op)
            .map_err(|e| CliError::Structure(e.to_string()))
    }
}

impl ShiftSpec {
    fn build(&self, alg: &Algebroid) -> Result<Vec<FirstOrder>, CliError> {
        let m = alg.rank();
        let ring = alg.ring();
        expect_len(&self.phi, m, "shift.phi")?;
        self.phi
            .iter()
            .enumerate()
            .map(|(a, v)| {
                let mut out = FirstOrder::zero(ring, m);
                out.scalar = parse_at(&v.scalar, ring, || format!("shift.phi[{a}].scalar"))?;
                if let Some(g) = &v.gens {
                    expect_len(g, m, &format!("shift.phi[{a}].gens"))?;
                    for (b, s) in g.iter().enumerate() {
                        out.gens[b] = parse_at(s, ring, || format!("shift.phi[{a}].gens[{b}]"))?;
                    }
                }
                Ok(out)
            })
            .collect()
    }
}

impl ModuleSpec {
    fn build(&self, alg: &Arc<Algebroid>) -> Result<LambdaModule, CliError> {
        let ring = alg.ring();
        let r = self.rank;
        expect_len(&self.matrices, alg.rank(), "module.matrices")?;
        let mats = self
            .matrices
            .iter()
            .enumerate()
            .map(|(a, rows)| {
                expect_len(rows, r, &format!("module.matrices[{a}]"))?;
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        expect_len(row, r, &format!("module.matrices[{a}][{i}]"))?;
                        row.iter()
                            .enumerate()
                            .map(|(j, s)| {
                                parse_at(s, ring, || format!("module.matrices[{a}][{i}][{j}]"))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                PolyMatrix::from_rows(ring, rows).map_err(|e| CliError::Structure(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        LambdaModule::new(alg, mats).map_err(|e| CliError::Structure(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CRYSTALLINE: &str = r#"{
        "schema_version": 1, "name": "c", "p": 3, "coordinates": ["x"],
        "algebroid": {"preset": "tangent"},
        "module": {"rank": 1, "matrices": [[["x^2"]]]}
    }"#;

    #[test]
    fn builds_tangent_scenario() {
        let b = Scenario::from_json(CRYSTALLINE).unwrap().build().unwrap();
        assert_eq!(b.algebroid.rank(), 1);
        assert_eq!(b.module.unwrap().matrices()[0].to_string(), "[[x^2]]");
    }

    #[test]
    fn reports_locations() {
        let bad = CRYSTALLINE.replace("x^2", "x^^2");
        let err = Scenario::from_json(&bad).unwrap().build().err().unwrap();
        assert!(
            err.to_string().contains("module.matrices[0][0][0]"),
            "{err}"
        );
        let err = Scenario::from_json("{\"schema_version\": 1,")
            .err()
            .unwrap();
        assert!(err.to_string().contains("line 1"), "{err}");
        let v2 = CRYSTALLINE.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(Scenario::from_json(&v2).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let bad = CRYSTALLINE.replace("[[[\"x^2\"]]]", "[[[\"x^2\", \"1\"]]]");
        let err = Scenario::from_json(&bad).unwrap().build().err().unwrap();
        assert!(matches!(err, CliError::Schema(_)), "{err}");
    }
}
