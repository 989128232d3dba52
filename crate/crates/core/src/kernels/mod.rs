//! Laguerre correlation kernels, their edge rescalings and Airy limits.

pub mod airy_limit;
pub mod laguerre_kernel;
pub mod rate;

pub use airy_limit::{airy_kernel, loe_limit_kernel};
pub use laguerre_kernel::KernelContext;
pub use rate::{default_grid, kernel_rate_experiment, phi_edge_sup_error, phi_grid, RateReport};
