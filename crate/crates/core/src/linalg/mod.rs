//! Dense complex linear algebra and bipartite state utilities.

pub mod eigen;
pub mod matrix;
pub mod random;
pub mod state;
pub mod svd;

pub use eigen::{eigh, eigvalsh, matrix_function, matrix_log, matrix_power, DomainGuard, Eigh, HermitianMatrix};
pub use matrix::{vec_inner, vec_kron, vec_norm, CMatrix, C64};
pub use random::{random_hermitian, random_matrix, random_unit_vector, random_unitary, rng_from_seed};
pub use state::{
    entropy_of_spectrum, maximally_entangled_vector, partial_trace, partial_trace_matrix, partial_transpose, random_density_matrix,
    random_faithful_state, DensityMatrix, Side,
};
pub use svd::{column_basis, singular_values, svd, trace_norm, Svd};
