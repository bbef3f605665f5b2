//! Mixed modular symbols for Γ₀(N) and Γ₁(N).
//!
//! The space is built as an explicit lattice from Manin and cusp generators,
//! with Hecke, diamond, Atkin–Lehner and conjugation actions, the antisymmetric
//! pairing on its dual, and a floating-point layer checking Eisenstein
//! determinant identities against Dirichlet L-values.

pub mod eisenstein;
pub mod error;
pub mod hecke;
pub mod lattice;
pub mod pairing;
pub mod report;
pub mod sl2;
pub mod symbols;

pub use error::{MmsError, Result};
