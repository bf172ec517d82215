//! Numerical tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// A named set of tolerances. Library functions use [`Tolerances::STRICT`]
/// unless a caller passes something else explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute slack for structural invariants (trace, positivity, Hermiticity).
    pub structural: f64,
    /// Relative slack for reconstructions such as `V Λ V†`.
    pub reconstruction: f64,
    /// Eigenvalues in `[-clip, 0]` are set to zero before powers and logs.
    pub clip: f64,
    /// Smallest eigenvalue a faithful state may have.
    pub faithful: f64,
}

impl Tolerances {
    pub const STRICT: Tolerances = Tolerances { structural: 1e-10, reconstruction: 1e-9, clip: 1e-10, faithful: 1e-12 };

    /// Looser profile for states assembled from lattice or quadrature output.
    pub const LATTICE: Tolerances = Tolerances { structural: 1e-8, reconstruction: 1e-7, clip: 1e-8, faithful: 1e-12 };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::STRICT
    }
}
