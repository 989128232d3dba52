//! Averaged products of Green function entries and their Monte Carlo means.
//!
//! A term is (1/N^{#I}) Σ_I s^{(p+1)} Π_i G_{x_i y_i}, where Latin indices
//! run over 1..N and Greek ones over N+1..N+M.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::resolvent::green_function;
use crate::ensembles::{sample_matrix, stream, DataMatrix, EntryDistribution};
use crate::error::{domain, Error, Result};
use crate::mc::{run_trials, MeanStderr};
use crate::mp_law::{control_psi, AspectRatio};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexKind {
    Latin,
    Greek,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermIndex {
    pub name: String,
    pub kind: IndexKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub name: String,
    pub indices: Vec<TermIndex>,
    /// (row, column) positions into `indices`.
    pub factors: Vec<(usize, usize)>,
    /// p + 1, the cumulant order of the weight.
    pub weight_order: u32,
    /// Whether s^{(p+1)} multiplies the product.
    pub weighted: bool,
    /// Exponent a of the printed prefactor N^{-a}; used only to rescale the
    /// estimate for display.
    pub printed_prefactor: f64,
    pub matched: bool,
}

impl TermSpec {
    /// 𝔫(index) for every index.
    pub fn appearances(&self) -> Vec<usize> {
        let mut c = vec![0; self.indices.len()];
        for &(x, y) in &self.factors {
            if x < c.len() {
                c[x] += 1;
            }
            if y < c.len() {
                c[y] += 1;
            }
        }
        c
    }

    pub fn unmatched_indices(&self) -> Vec<usize> {
        self.appearances()
            .iter()
            .enumerate()
            .filter(|(_, &k)| k % 2 == 1)
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of off-diagonal factors.
    pub fn degree(&self) -> usize {
        self.factors.iter().filter(|(x, y)| x != y).count()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(format!("term {}: {msg}", self.name)));
        if self.indices.is_empty() || self.factors.is_empty() {
            return bad("no indices or no factors".into());
        }
        let k = self.indices.len();
        if let Some(f) = self.factors.iter().find(|(x, y)| *x >= k || *y >= k) {
            return bad(format!("factor {f:?} refers to a missing index"));
        }
        if let Some(i) = self.appearances().iter().position(|&c| c == 0) {
            return bad(format!("index {} never appears", self.indices[i].name));
        }
        if !(3..=4).contains(&self.weight_order) {
            return bad(format!("weight order {} not in 3..=4", self.weight_order));
        }
        if self.matched != self.unmatched_indices().is_empty() {
            return bad("matched flag disagrees with the index parities".into());
        }
        Ok(())
    }

    /// Same product without the cumulant weight.
    pub fn stripped(&self) -> Self {
        Self {
            weighted: false,
            ..self.clone()
        }
    }

    fn is_third_one(&self) -> bool {
        let kinds: Vec<IndexKind> = self.indices.iter().map(|i| i.kind).collect();
        kinds == [IndexKind::Latin, IndexKind::Latin, IndexKind::Greek]
            && self.factors == [(0, 2), (1, 0), (2, 2), (1, 1)]
    }
}

fn term(name: &str, factors: &[(usize, usize)], order: u32, printed: f64) -> TermSpec {
    let idx = |n: &str, kind| TermIndex {
        name: n.into(),
        kind,
    };
    let mut t = TermSpec {
        name: name.into(),
        indices: vec![
            idx("v", IndexKind::Latin),
            idx("b", IndexKind::Latin),
            idx("alpha", IndexKind::Greek),
        ],
        factors: factors.to_vec(),
        weight_order: order,
        weighted: true,
        printed_prefactor: printed,
        matched: false,
    };
    t.matched = t.unmatched_indices().is_empty();
    t
}

/// The six shipped terms, over indices (v, b, α).
pub fn registry() -> Vec<TermSpec> {
    let (v, b, a) = (0, 1, 2);
    vec![
        term("example-3", &[(v, a), (b, v), (a, a), (b, b)], 3, 1.5),
        term(
            "example-4",
            &[(v, a), (a, v), (a, a), (b, b), (b, b)],
            4,
            2.0,
        ),
        term("third-1", &[(v, a), (b, v), (a, a), (b, b)], 3, 1.5),
        term("third-2", &[(v, a), (a, v), (a, b), (b, b)], 3, 1.5),
        term(
            "fourth-1",
            &[(v, a), (a, v), (a, a), (b, b), (b, b)],
            4,
            2.0,
        ),
        term(
            "fourth-2",
            &[(v, b), (b, v), (a, a), (a, a), (b, b)],
            4,
            2.0,
        ),
    ]
}

pub fn registry_term(name: &str) -> Result<TermSpec> {
    registry()
        .into_iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::Validation(format!("no registry term named {name}")))
}

/// Σ_I Π G over all index values, by direct summation of the dense G.
pub fn term_sum_dense(term: &TermSpec, x: &DataMatrix, z: Complex64) -> Result<Complex64> {
    term.validate()?;
    let g = green_function(x, z)?.assemble();
    let (n, m) = (x.n(), x.m());
    let ranges: Vec<(usize, usize)> = term
        .indices
        .iter()
        .map(|i| match i.kind {
            IndexKind::Latin => (0, n),
            IndexKind::Greek => (n, n + m),
        })
        .collect();
    let mut pos: Vec<usize> = ranges.iter().map(|r| r.0).collect();
    let mut total = Complex64::new(0.0, 0.0);
    'outer: loop {
        let mut p = Complex64::new(1.0, 0.0);
        for &(r, c) in &term.factors {
            p *= g[(pos[r], pos[c])];
        }
        total += p;
        for k in 0..pos.len() {
            pos[k] += 1;
            if pos[k] < ranges[k].1 {
                continue 'outer;
            }
            pos[k] = ranges[k].0;
        }
        break;
    }
    Ok(total)
}

/// Σ_{v,b,α} G_vα G_bv G_αα G_bb = d_Nᵀ R² X* d_M for real X, where
/// d_N = diag R and d_M = diag z𝓡 = diag(XRX*) - 1.
pub fn third_one_sum(x: &DataMatrix, z: Complex64) -> Result<Complex64> {
    let Some(data) = x.real_data() else {
        return Err(Error::Unsupported("closed form needs real entries".into()));
    };
    x.check_finite()?;
    let (m, n) = (x.m(), x.n());
    let xm = DMatrix::from_column_slice(m, n, data);
    let gram = xm.transpose() * &xm;
    let eig = SymmetricEigen::new(gram);
    let v = &eig.eigenvectors;
    let inv: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| 1.0 / (l - z)).collect();
    let u = &xm * v;
    let d_n: Vec<Complex64> = (0..n)
        .map(|b| (0..n).map(|k| inv[k] * v[(b, k)] * v[(b, k)]).sum())
        .collect();
    let d_m: Vec<Complex64> = (0..m)
        .map(|a| {
            (0..n)
                .map(|k| inv[k] * u[(a, k)] * u[(a, k)])
                .sum::<Complex64>()
                - 1.0
        })
        .collect();
    // uᵀ d_M = Vᵀ X* d_M, then weight by (λ - z)^{-2} and contract with Vᵀ d_N
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let mut ud = Complex64::new(0.0, 0.0);
        for a in 0..m {
            ud += d_m[a] * u[(a, k)];
        }
        let mut vd = Complex64::new(0.0, 0.0);
        for b in 0..n {
            vd += d_n[b] * v[(b, k)];
        }
        total += vd * inv[k] * inv[k] * ud;
    }
    Ok(total)
}

fn term_sum(term: &TermSpec, x: &DataMatrix, z: Complex64) -> Result<Complex64> {
    if term.is_third_one() && !x.is_complex() {
        third_one_sum(x, z)
    } else {
        term_sum_dense(term, x, z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub name: String,
    pub trials: u64,
    pub weight: f64,
    /// Mean of (1/N^{#I}) Σ weight·ΠG, real and imaginary parts.
    pub re: MeanStderr,
    pub im: MeanStderr,
    pub psi: f64,
    pub degree: usize,
    pub matched: bool,
    /// N^{#I - a}: multiply the estimate by this for the printed prefactor.
    pub printed_scale: f64,
}

impl TermReport {
    pub fn abs(&self) -> f64 {
        self.re.mean.hypot(self.im.mean)
    }

    pub fn stderr(&self) -> f64 {
        self.re.stderr.hypot(self.im.stderr)
    }

    /// Ψ^d.
    pub fn psi_power(&self) -> f64 {
        self.psi.powi(self.degree as i32)
    }
}

/// s^{(p+1)}(0) for a law.
pub fn cumulant_weight(order: u32, dist: EntryDistribution) -> f64 {
    match order {
        3 => dist.third_cumulant(),
        4 => dist.fourth_cumulant(),
        _ => f64::NAN,
    }
}

pub fn term_average(
    term: &TermSpec,
    dist: EntryDistribution,
    dims: AspectRatio,
    z: Complex64,
    trials: u64,
    seed: u64,
) -> Result<TermReport> {
    term.validate()?;
    if !(z.im > 0.0) {
        return domain("need Im z > 0");
    }
    if trials == 0 {
        return domain("need at least one trial");
    }
    let weight = if term.weighted {
        cumulant_weight(term.weight_order, dist)
    } else {
        1.0
    };
    let n = dims.n_cols() as f64;
    let count = term.indices.len() as f64;
    let norm = n.powf(-count);
    let (re, im) = if weight == 0.0 {
        // the weight annihilates every sample
        let zero = MeanStderr {
            mean: 0.0,
            stderr: 0.0,
            n: trials as usize,
        };
        (zero, zero)
    } else {
        let v = run_trials(trials, |k| -> Result<Complex64> {
            let x = sample_matrix(dims, dist, &mut stream(seed, "term", k));
            Ok(term_sum(term, &x, z)? * (weight * norm))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let re: Vec<f64> = v.iter().map(|c| c.re).collect();
        let im: Vec<f64> = v.iter().map(|c| c.im).collect();
        (MeanStderr::of(&re), MeanStderr::of(&im))
    };
    Ok(TermReport {
        name: term.name.clone(),
        trials,
        weight,
        re,
        im,
        psi: control_psi(z, dims.n_cols(), dims.rho())?,
        degree: term.degree(),
        matched: term.matched,
        printed_scale: n.powf(count - term.printed_prefactor),
    })
}
