//! Exact symbolic computation for Lie and associative conformal algebras.

pub mod algebra;
pub mod cohomology;
pub mod dist;
pub mod arith;
pub mod elt;
pub mod error;
pub mod linalg;
pub mod module;
pub mod modes;

pub use error::{Error, Result};
