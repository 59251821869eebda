//! Compile pseudo-Boolean polynomials, factoring instances and GF(2) equation
//! systems into compact QUBO models, solve them, and lift solutions back.

pub mod anf;
pub mod error;
pub mod factor;
pub mod graph;
pub mod io;
pub mod pbf;
pub mod quadratize;
pub mod qubo;

pub use error::{Error, Result};
pub use pbf::{
    all_assignments, negate_to_posiform, Assignment, Literal, LiteralSet, Monomial, PolyStats, Polynomial, Posiform,
    VariableId,
};
