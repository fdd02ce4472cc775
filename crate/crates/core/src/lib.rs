//! Restricted Lie algebroids in characteristic p, their enveloping algebras,
//! p-curvature of modules, and Hitchin invariants with Frobenius descent.

pub mod algebroid;
pub mod derivation;
pub mod error;
pub mod field;
pub mod hitchin;
pub mod identities;
pub mod lambda_module;
pub mod matrix;
pub mod ore;
pub mod panel;
pub mod parse;
pub mod poly;
pub mod report;

pub use algebroid::{Algebroid, FirstOrder};
pub use derivation::Derivation;
pub use error::{Error, PolyError, Result};
pub use field::PrimeField;
pub use lambda_module::{LambdaModule, MatrixDiffOp, PCurvature};
pub use matrix::PolyMatrix;
pub use ore::{Operator, PbwMonomial, Symbol};
pub use panel::PanelConfig;
pub use parse::parse_poly;
pub use poly::{Descent, Monomial, Poly, PolyRing, VarKind};
pub use report::{CheckResult, Status, ValidationReport};
