//! Unit equations in function fields: finite fields, polynomials, the
//! rational function field, quadratic extensions, unit-sum decompositions
//! and witness searches.

pub mod acceptance;
pub mod decompose;
pub mod error;
pub mod ff;
pub mod funcfield;
mod linalg;
pub mod parse;
pub mod poly;
pub mod exec;
pub mod quadratic;
pub mod search;
pub mod sweep;

pub use error::{Error, Result};
pub use ff::{FieldElement, FieldSpec};
pub use funcfield::{Divisor, LaurentSeries, Mobius, Place, RationalFunction};
pub use poly::Polynomial;
