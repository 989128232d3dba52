//! Edge centering and scaling of the largest eigenvalue.

use serde::{Deserialize, Serialize};

use crate::mp_law::AspectRatio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeVariant {
    /// μ = (√M + √N)², σ = (√M + √N)(M^{-1/2} + N^{-1/2})^{1/3}.
    Paper,
    /// The same with N - 1/2 and M - 1/2 in place of N and M.
    Ma,
}

impl std::str::FromStr for EdgeVariant {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "ma" => Ok(Self::Ma),
            _ => Err(crate::Error::Validation(format!(
                "unknown rescaling variant {s:?}"
            ))),
        }
    }
}

/// (μ, σ) for the given shape and variant.
pub fn edge_constants(dims: AspectRatio, variant: EdgeVariant) -> (f64, f64) {
    let shift = match variant {
        EdgeVariant::Paper => 0.0,
        EdgeVariant::Ma => 0.5,
    };
    let rn = (dims.n_cols() as f64 - shift).sqrt();
    let rm = (dims.m_rows() as f64 - shift).sqrt();
    let mu = (rn + rm) * (rn + rm);
    let sigma = (rn + rm) * (1.0 / rm + 1.0 / rn).cbrt();
    (mu, sigma)
}

/// r = (N·λ_max - μ)/σ.
pub fn rescale_largest(lambda_max: f64, dims: AspectRatio, variant: EdgeVariant) -> f64 {
    let (mu, sigma) = edge_constants(dims, variant);
    (dims.n_cols() as f64 * lambda_max - mu) / sigma
}
