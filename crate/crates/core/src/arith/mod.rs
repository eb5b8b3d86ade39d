//! Arithmetic substrate: rationals, sparse polynomials, univariate helpers
//! and the Grassmann algebra.

pub mod grassmann;
pub mod poly;
pub mod rat;
pub mod upoly;

pub use grassmann::GrassmannElt;
pub use poly::{MPoly, Monomial, Var};
pub use rat::Rat;
pub use upoly::UPoly;
