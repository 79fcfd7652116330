//! Exact finitary incidence algebras `FI(X, K)` of finite posets over odd
//! prime fields and the rationals, their involutions, and the classification
//! of those involutions up to (inner) equivalence.
//!
//! Every classification result is available along two routes: a
//! structural fast path through the component decomposition of `X`, and an
//! exhaustive search over units that serves as the oracle for it.

pub mod error;
pub mod algebra;
pub mod battery;
pub mod classify;
pub mod cli;
pub mod exec;
pub mod involutions;
mod linalg;
pub mod morphisms;
pub mod posets;
pub mod scalars;

pub use error::{Error, Result};
