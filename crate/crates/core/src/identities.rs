//! Exact algebraic identities, checked on random instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_matrix, stream, EntryDistribution};
use crate::error::{Error, Result};
use crate::green::{green_function, ward_check};
use crate::mp_law::{quadratic_residual, stieltjes_mp, AspectRatio};
use crate::Complex64;

pub const WARD_TOL: f64 = 1e-10;
pub const QUADRATIC_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const INVERSE_TOL: f64 = 1e-8;

/// Worst residual of each identity over the suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Ward relation 1, relative, over 100 (X, z).
    pub ward: f64,
    /// |z m² + (z+1-ρ)m + 1| over 1000 (z, ρ).
    pub quadratic: f64,
    /// |m - ρ𝔪 - (ρ-1)/z| / |m| with both traces from dense inverses.
    pub trace: f64,
    /// ‖HG - I‖_max over 20 matrices × 10 spectral parameters.
    pub inverse: f64,
}

impl IdentityReport {
    pub fn passes(&self) -> bool {
        self.ward <= WARD_TOL
            && self.quadratic <= QUADRATIC_TOL
            && self.trace <= TRACE_TOL
            && self.inverse <= INVERSE_TOL
    }
}

pub fn identity_suite(seed: u64) -> Result<IdentityReport> {
    let mut rng = stream(seed, "identities", 0);
    let lib = EntryDistribution::real_library();

    let mut ward: f64 = 0.0;
    let mut trace: f64 = 0.0;
    for k in 0..100u64 {
        let n = rng.random_range(4..=24);
        let m = n + rng.random_range(0..=24);
        let dims = AspectRatio::new(m, n)?;
        let x = sample_matrix(
            dims,
            lib[k as usize % lib.len()],
            &mut stream(seed, "identities-x", k),
        );
        let z = Complex64::new(rng.random_range(0.2..8.0), rng.random_range(0.05..2.0));
        let g = green_function(&x, z)?;
        let w = ward_check(&g);
        if let Some(why) = w.skipped {
            return Err(Error::Domain(why));
        }
        ward = ward.max(w.relation1_rel_err);
        let rho = dims.rho();
        trace = trace.max((g.m - (rho * g.frak_m + (rho - 1.0) / z)).norm() / g.m.norm());
    }

    let mut quadratic: f64 = 0.0;
    for _ in 0..1000 {
        let rho = rng.random_range(1.0..4.0);
        let z = Complex64::new(rng.random_range(-2.0..12.0), rng.random_range(1e-3..5.0));
        quadratic = quadratic.max(quadratic_residual(z, stieltjes_mp(z, rho)?, rho));
    }

    let mut inverse: f64 = 0.0;
    for k in 0..20u64 {
        let n = 5 + k as usize;
        let dims = AspectRatio::new(2 * n, n)?;
        let x = sample_matrix(
            dims,
            EntryDistribution::Gaussian,
            &mut stream(seed, "identities-inv", k),
        );
        for _ in 0..10 {
            let z = Complex64::new(rng.random_range(0.0..8.0), rng.random_range(0.01..1.0));
            inverse = inverse.max(green_function(&x, z)?.inverse_residual());
        }
    }
    Ok(IdentityReport {
        ward,
        quadratic,
        trace,
        inverse,
    })
}
