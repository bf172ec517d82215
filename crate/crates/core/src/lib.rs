//! Entanglement measures for finite bipartite quantum states and closed-form
//! entanglement bounds for free, integrable and conformal field theories.
// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cft;
pub mod error;
pub mod gaussian;
pub mod integrable;
pub mod linalg;
pub mod measures;
pub mod modular;
pub mod sectors;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{CMatrix, DensityMatrix, HermitianMatrix, Side, C64};
pub use tol::Tolerances;
