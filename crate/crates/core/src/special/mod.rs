//! Airy and Laguerre special functions.

pub mod airy;
pub mod laguerre;

pub use airy::{airy, airy_primitive, AiryValue};
pub use laguerre::{laguerre_psi, laguerre_psi_all, phi_edge, EdgeFn};
