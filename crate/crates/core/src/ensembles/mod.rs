//! Random data matrices, the interpolation flow and eigenvalue extraction.

pub mod dist;
pub mod eigen;
pub mod matrix;
pub mod rescale;
pub mod rng;
pub mod tridiagonal;

pub use dist::EntryDistribution;
pub use eigen::{gram_eigenvalues, gram_eigenvalues_fast, largest_gram_eigenvalue};
pub use matrix::{
    flow_coefficients, flow_matrix, sample_gaussian_like, sample_matrix, DataMatrix, Entries,
    FlowState,
};
pub use rescale::{edge_constants, rescale_largest, EdgeVariant};
pub use rng::{stream, Stream};
pub use tridiagonal::{
    laguerre_bidiagonal, laguerre_tridiagonal_eigs, laguerre_tridiagonal_largest,
};
