//! Data matrices with standardized entries h/√N, and the interpolation flow.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::EntryDistribution;
use crate::error::{domain, Error, Result};
use crate::mp_law::AspectRatio;
use crate::Complex64;

/// Column-major M×N storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Entries {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    dims: AspectRatio,
    entries: Entries,
}

impl DataMatrix {
    pub fn from_real(dims: AspectRatio, col_major: Vec<f64>) -> Result<Self> {
        Self::checked(dims, Entries::Real(col_major))
    }

    pub fn from_complex(dims: AspectRatio, col_major: Vec<Complex64>) -> Result<Self> {
        Self::checked(dims, Entries::Complex(col_major))
    }

    /// Builds a real matrix from row-major data (convenient for literals).
    pub fn from_real_rows(m: usize, n: usize, rows: &[f64]) -> Result<Self> {
        let dims = AspectRatio::new(m, n)?;
        if rows.len() != m * n {
            return Err(Error::Validation(format!(
                "expected {} entries, got {}",
                m * n,
                rows.len()
            )));
        }
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                data[j * m + i] = rows[i * n + j];
            }
        }
        Self::checked(dims, Entries::Real(data))
    }

    fn checked(dims: AspectRatio, entries: Entries) -> Result<Self> {
        let len = match &entries {
            Entries::Real(v) => v.len(),
            Entries::Complex(v) => v.len(),
        };
        if len != dims.m_rows() * dims.n_cols() {
            return Err(Error::Validation(format!(
                "{len} entries for a {}x{} matrix",
                dims.m_rows(),
                dims.n_cols()
            )));
        }
        Ok(Self { dims, entries })
    }

    pub fn dims(&self) -> AspectRatio {
        self.dims
    }

    pub fn m(&self) -> usize {
        self.dims.m_rows()
    }

    pub fn n(&self) -> usize {
        self.dims.n_cols()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.entries, Entries::Complex(_))
    }

    pub fn real_data(&self) -> Option<&[f64]> {
        match &self.entries {
            Entries::Real(v) => Some(v),
            Entries::Complex(_) => None,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = j * self.m() + i;
        match &self.entries {
            Entries::Real(v) => Complex64::new(v[k], 0.0),
            Entries::Complex(v) => v[k],
        }
    }

    /// Data error on NaN or infinite entries.
    pub fn check_finite(&self) -> Result<()> {
        let ok = match &self.entries {
            Entries::Real(v) => v.iter().all(|x| x.is_finite()),
            Entries::Complex(v) => v.iter().all(|x| x.re.is_finite() && x.im.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Data("non-finite matrix entry".into()))
        }
    }

    /// Real embedding [[Re, -Im], [Im, Re]] (2M×2N); each singular value of
    /// a complex matrix appears twice in it.
    pub(crate) fn real_embedding(&self) -> (usize, usize, Vec<f64>) {
        let (m, n) = (self.m(), self.n());
        match &self.entries {
            Entries::Real(v) => (m, n, v.clone()),
            Entries::Complex(v) => {
                let (mm, nn) = (2 * m, 2 * n);
                let mut out = vec![0.0; mm * nn];
                for j in 0..n {
                    for i in 0..m {
                        let z = v[j * m + i];
                        out[j * mm + i] = z.re;
                        out[j * mm + m + i] = z.im;
                        out[(n + j) * mm + i] = -z.im;
                        out[(n + j) * mm + m + i] = z.re;
                    }
                }
                (mm, nn, out)
            }
        }
    }
}

/// Draws an M×N matrix with independent entries h/√N, column by column.
pub fn sample_matrix<R: Rng + ?Sized>(
    dims: AspectRatio,
    dist: EntryDistribution,
    rng: &mut R,
) -> DataMatrix {
    let len = dims.m_rows() * dims.n_cols();
    let scale = 1.0 / (dims.n_cols() as f64).sqrt();
    let entries = if dist.is_complex() {
        Entries::Complex((0..len).map(|_| dist.sample_complex(rng) * scale).collect())
    } else {
        let mut v = vec![0.0; len];
        dist.fill_real(rng, &mut v, scale);
        Entries::Real(v)
    };
    DataMatrix { dims, entries }
}

/// Gaussian companion W for the flow: real or complex to match `like`.
pub fn sample_gaussian_like<R: Rng + ?Sized>(like: &DataMatrix, rng: &mut R) -> DataMatrix {
    let dist = if like.is_complex() {
        EntryDistribution::ComplexGaussian
    } else {
        EntryDistribution::Gaussian
    };
    sample_matrix(like.dims(), dist, rng)
}

/// Initial matrix, its Gaussian companion and the flow time.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub x0: DataMatrix,
    pub w: DataMatrix,
    pub t: f64,
}

/// Coefficients (e^{-t/2}, √(1-e^{-t})) of the flow.
pub fn flow_coefficients(t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return domain(format!("flow time t = {t} must be nonnegative"));
    }
    Ok(((-0.5 * t).exp(), (-(-t).exp_m1()).sqrt()))
}

/// X(t) = e^{-t/2} X0 + √(1-e^{-t}) W.
pub fn flow_matrix(state: &FlowState) -> Result<DataMatrix> {
    let (a, b) = flow_coefficients(state.t)?;
    if state.x0.dims() != state.w.dims() {
        return Err(Error::Validation("X0 and W have different shapes".into()));
    }
    if state.t == 0.0 {
        return Ok(state.x0.clone());
    }
    let entries = match (&state.x0.entries, &state.w.entries) {
        (Entries::Real(x), Entries::Real(w)) => {
            Entries::Real(x.iter().zip(w).map(|(x, w)| a * x + b * w).collect())
        }
        (Entries::Complex(x), Entries::Complex(w)) => {
            Entries::Complex(x.iter().zip(w).map(|(x, w)| x * a + w * b).collect())
        }
        (Entries::Real(x), Entries::Complex(w)) => {
            Entries::Complex(x.iter().zip(w).map(|(x, w)| w * b + a * x).collect())
        }
        (Entries::Complex(_), Entries::Real(_)) => {
            return Err(Error::Validation(
                "complex X0 needs a complex Gaussian W".into(),
            ));
        }
    };
    Ok(DataMatrix {
        dims: state.x0.dims(),
        entries,
    })
}
