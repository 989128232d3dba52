//! Experiment configuration: a TOML file with one table per subcommand,
//! overridden field by field from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    TwTable,
    KernelRates,
    KsScan,
    Gfc,
    Locallaw,
    Rigidity,
    CumulantCheck,
    TermAverage,
    Selftest,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Self::TwTable => "tw-table",
            Self::KernelRates => "kernel-rates",
            Self::KsScan => "ks-scan",
            Self::Gfc => "gfc",
            Self::Locallaw => "locallaw",
            Self::Rigidity => "rigidity",
            Self::CumulantCheck => "cumulant-check",
            Self::TermAverage => "term-average",
            Self::Selftest => "selftest",
        }
    }

    fn needs_seed(self) -> bool {
        !matches!(self, Self::TwTable | Self::KernelRates)
    }
}

fn d<T>(v: &mut Option<T>, x: T) {
    if v.is_none() {
        *v = Some(x);
    }
}

/// Every knob any experiment reads. Unset fields take per-kind defaults in
/// [`ExperimentConfig::resolve`]; fields a kind does not read stay unset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_deserializing)]
    pub kind: Option<Kind>,
    /// Values of N.
    pub dims: Option<Vec<usize>>,
    /// M/N.
    pub ratio: Option<f64>,
    /// Entry law, e.g. `rademacher` or `skewed:0.3`; `all` for the real library.
    pub dist: Option<String>,
    /// `paper` or `ma`.
    pub variant: Option<String>,
    /// `tridiagonal` or `dense`.
    pub sampler: Option<String>,
    pub beta: Option<u8>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Re z; defaults to E₊.
    pub energy: Option<f64>,
    /// Im z; defaults to N^{-eta_exponent}.
    pub eta: Option<f64>,
    pub eta_exponent: Option<f64>,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub r0: Option<f64>,
    /// Truncation order l of the cumulant expansion.
    pub order: Option<usize>,
    pub samples: Option<u64>,
    /// Test functions: `sin-gauss`, `tanh`, `poly`.
    pub functions: Option<Vec<String>>,
    /// Registry term names; all terms when unset.
    pub terms: Option<Vec<String>>,
    /// Drop the cumulant weight from the terms.
    pub stripped: Option<bool>,
    /// Output prefix; `.csv`, `.json` and `.plot.dat` are appended.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f.clone(); })*
    };
}

impl ExperimentConfig {
    /// The `[kind]` table of a config file, or an empty config when absent.
    pub fn from_file(path: &Path, kind: Kind) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, kind)
    }

    pub fn from_toml(text: &str, kind: Kind) -> Result<Self, CliError> {
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e| CliError::Usage(format!("config: {e}")))?;
        let Some(section) = doc.remove(kind.name()) else {
            return Ok(Self::default());
        };
        section.try_into().map_err(|e: toml::de::Error| {
            CliError::Usage(format!("config [{}]: {}", kind.name(), e.message()))
        })
    }

    /// Fields set in `other` replace ours.
    pub fn overlay(&mut self, other: &Self) {
        overlay!(
            self,
            other,
            dims,
            ratio,
            dist,
            variant,
            sampler,
            beta,
            trials,
            seed,
            energy,
            eta,
            eta_exponent,
            kappa1,
            kappa2,
            t_grid,
            r0,
            order,
            samples,
            functions,
            terms,
            stripped,
            output
        );
    }

    /// Fills per-kind defaults and validates every field the kind reads.
    pub fn resolve(mut self, kind: Kind) -> Result<Self, CliError> {
        self.kind = Some(kind);
        let mut bad = Vec::new();
        if kind.needs_seed() && self.seed.is_none() && kind != Kind::Selftest {
            bad.push("seed: required (runs are never seeded from the clock)".to_string());
        }
        match kind {
            Kind::TwTable => {}
            Kind::Selftest => d(&mut self.seed, 1),
            Kind::KernelRates => d(&mut self.dims, vec![50, 100, 200, 400]),
            Kind::KsScan => {
                d(&mut self.dims, vec![50, 100, 200, 400]);
                d(&mut self.ratio, 2.0);
                d(&mut self.sampler, "tridiagonal".into());
                d(&mut self.variant, "ma".into());
                d(&mut self.r0, -3.5);
                d(&mut self.trials, 10_000);
                if self.sampler.as_deref() == Some("tridiagonal") {
                    d(&mut self.beta, 1);
                } else {
                    d(&mut self.dist, "rademacher".into());
                }
            }
            Kind::Gfc => {
                d(&mut self.dims, vec![200]);
                d(&mut self.ratio, 2.0);
                d(&mut self.dist, "rademacher".into());
                d(&mut self.trials, 1000);
                d(&mut self.eta_exponent, 0.75);
                if self.t_grid.is_none() {
                    let n = self
                        .dims
                        .as_ref()
                        .and_then(|v| v.first().copied())
                        .unwrap_or(200) as f64;
                    self.t_grid = Some(vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0 * n.ln()]);
                }
            }
            Kind::Locallaw => {
                d(&mut self.dims, vec![100, 200, 400]);
                d(&mut self.ratio, 2.0);
                d(&mut self.dist, "gaussian".into());
                d(&mut self.trials, 200);
                d(&mut self.eta_exponent, 0.75);
            }
            Kind::Rigidity => {
                d(&mut self.dims, vec![100, 200, 400]);
                d(&mut self.ratio, 2.0);
                d(&mut self.dist, "gaussian".into());
                d(&mut self.trials, 100);
            }
            Kind::CumulantCheck => {
                d(&mut self.dist, "all".into());
                d(
                    &mut self.functions,
                    vec!["sin-gauss".into(), "tanh".into(), "poly".into()],
                );
                d(&mut self.order, 5);
                d(&mut self.samples, 1_000_000);
            }
            Kind::TermAverage => {
                d(&mut self.dims, vec![100]);
                d(&mut self.ratio, 2.0);
                d(&mut self.dist, "rademacher".into());
                d(&mut self.trials, 1000);
                d(&mut self.eta_exponent, 0.7);
                d(&mut self.stripped, false);
            }
        }
        if let Some(dims) = &self.dims {
            if dims.is_empty() || dims.contains(&0) {
                bad.push(format!("dims: need positive values, got {dims:?}"));
            }
        }
        if let Some(r) = self.ratio {
            if !(r >= 1.0 && r.is_finite()) {
                bad.push(format!("ratio: need M/N >= 1, got {r}"));
            }
        }
        if self.trials == Some(0) {
            bad.push("trials: need at least one".into());
        }
        if self.samples == Some(0) {
            bad.push("samples: need at least one".into());
        }
        if let Some(b) = self.beta {
            if b != 1 && b != 2 {
                bad.push(format!("beta: 1 or 2, got {b}"));
            }
        }
        if let Some(v) = &self.variant {
            if v != "paper" && v != "ma" {
                bad.push(format!("variant: paper or ma, got {v:?}"));
            }
        }
        if let Some(s) = &self.sampler {
            if s != "tridiagonal" && s != "dense" {
                bad.push(format!("sampler: tridiagonal or dense, got {s:?}"));
            }
        }
        if let Some(e) = self.eta {
            if !(e > 0.0) {
                bad.push(format!("eta: must be positive, got {e}"));
            }
        }
        if let (Some(a), Some(b)) = (self.kappa1, self.kappa2) {
            if a >= b {
                bad.push(format!("kappa1 = {a} must be below kappa2 = {b}"));
            }
        }
        if let Some(t) = &self.t_grid {
            if t.iter().any(|v| !(*v >= 0.0)) {
                bad.push("t_grid: times must be nonnegative".into());
            }
        }
        if bad.is_empty() {
            Ok(self)
        } else {
            Err(CliError::Usage(format!(
                "invalid {} config:\n  {}",
                kind.name(),
                bad.join("\n  ")
            )))
        }
    }

    /// SHA-256 of the canonical JSON form, first 16 hex digits. The output
    /// path is not part of it.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn output_prefix(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from(self.kind.map(Kind::name).unwrap_or("twlab")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_section_then_flags() {
        let text = "[ks-scan]\ndims = [64, 128]\ntrials = 50\nseed = 3\n\n[gfc]\ntrials = 9\n";
        let mut c = ExperimentConfig::from_toml(text, Kind::KsScan).unwrap();
        c.overlay(&ExperimentConfig {
            trials: Some(70),
            ..Default::default()
        });
        let c = c.resolve(Kind::KsScan).unwrap();
        assert_eq!(c.dims, Some(vec![64, 128]));
        assert_eq!(c.trials, Some(70));
        assert_eq!(c.variant.as_deref(), Some("ma"));
    }

    #[test]
    fn unknown_keys_and_missing_seed_are_usage_errors() {
        assert!(matches!(
            ExperimentConfig::from_toml("[gfc]\nbogus = 1\n", Kind::Gfc),
            Err(CliError::Usage(_))
        ));
        let err = ExperimentConfig::default().resolve(Kind::Gfc).unwrap_err();
        assert!(err.to_string().contains("seed"));
    }

    #[test]
    fn hash_ignores_output_path() {
        let a = ExperimentConfig {
            seed: Some(1),
            ..Default::default()
        }
        .resolve(Kind::Rigidity)
        .unwrap();
        let mut b = a.clone();
        b.output = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed = Some(2);
        assert_ne!(a.hash(), c.hash());
    }
}
