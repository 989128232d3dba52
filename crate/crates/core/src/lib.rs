//! Numerical laboratory for the soft edge of sample covariance matrices.
//!
//! The crate covers the Marchenko–Pastur law, Laguerre and Airy correlation
//! kernels, the Tracy–Widom distributions, random matrix samplers with
//! their eigensolvers, Green function diagnostics, cumulant expansions and
//! the statistics used to fit convergence rates.

pub mod cumulants;
pub mod edge_stats;
pub mod ensembles;
pub mod error;
pub mod green;
pub mod identities;
pub mod kernels;
pub mod linalg;
pub mod mc;
pub mod mp_law;
pub mod quadrature;
pub mod special;
pub mod tracy_widom;

pub use ensembles::{DataMatrix, EdgeVariant, EntryDistribution};
pub use error::{Error, Result};
pub use kernels::KernelContext;
pub use mp_law::{AspectRatio, DomainParams, MpModel, SpectralPoint};
pub use num_complex::Complex64;
pub use tracy_widom::Beta;
