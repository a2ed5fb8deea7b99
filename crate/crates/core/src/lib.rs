//! Exact-arithmetic calculus for plane polynomial automorphisms over `Q`:
//! sparse multivariate polynomials, triangular/linear polynomial checks,
//! formal inverses of `Y + Z U(Y)^b`, a Jung-van der Kulk polydegree engine,
//! and the degeneration-family construction tying them together.

pub mod algebra;
pub mod expr;
pub mod family;
pub mod inverse;
pub mod planemap;
pub mod triangular;

pub use algebra::{MultiPoly, Rational, Var, VarTable};
pub use planemap::{decompose, PlaneMap, Polydegree};
