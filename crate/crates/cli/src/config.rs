//! Experiment configuration (JSON, schema version 1).

use std::path::{Path, PathBuf};

use hpl_core::blaschke::{BlaschkeProduct, ProbeTolerances, ZeroSequence};
use hpl_core::polydisc::DefectSign;
use hpl_core::spectral::SpectralThresholds;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type SymbolPair = (BlaschkeProduct<f64>, BlaschkeProduct<f64>);

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    #[default]
    Exm1,
    Prop1,
    Custom,
}

/// A finite Blaschke product placed in a variable (1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    /// Zeros as `[re, im]` pairs, each of modulus < 1.
    #[serde(default)]
    pub zeros: Vec<[f64; 2]>,
    #[serde(default)]
    pub origin_multiplicity: usize,
    #[serde(default = "default_variable")]
    pub variable: usize,
}

fn default_variable() -> usize {
    1
}

impl SymbolSpec {
    pub fn to_blaschke(&self, label: &str) -> Result<BlaschkeProduct<f64>, CliError> {
        let zeros: Vec<Complex<f64>> = self.zeros.iter().map(|z| Complex::new(z[0], z[1])).collect();
        let seq = ZeroSequence::from_complex(label, &zeros).map_err(|e| CliError::Config(format!("{label}: {e}")))?;
        BlaschkeProduct::new(seq, Complex::new(1.0, 0.0), self.origin_multiplicity)
            .map_err(|e| CliError::Config(format!("{label}: {e}")))
    }

    pub fn degree(&self) -> usize {
        self.zeros.len() + self.origin_multiplicity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub s: f64,
    pub c: f64,
    pub wc: f64,
    pub trend_slack: f64,
    pub s_floor: f64,
    pub stability: f64,
    pub rank_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let p = ProbeTolerances::default();
        let s = SpectralThresholds::default();
        Self {
            s: p.tol_s,
            c: p.tol_c,
            wc: p.tol_wc,
            trend_slack: p.trend_slack,
            s_floor: p.s_floor,
            stability: s.stability_tol,
            rank_rel: s.rank_rel_tol,
        }
    }
}

impl Tolerances {
    pub fn probe(&self) -> ProbeTolerances {
        ProbeTolerances { tol_s: self.s, tol_c: self.c, tol_wc: self.wc, trend_slack: self.trend_slack, s_floor: self.s_floor }
    }

    pub fn spectral(&self) -> SpectralThresholds {
        SpectralThresholds { stability_tol: self.stability, rank_rel_tol: self.rank_rel, ..SpectralThresholds::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExportKind {
    Toeplitz,
    Hankel,
    SubmoduleProjection,
    ModelProjection,
}

/// One matrix to export. Toeplitz and Hankel take `coeffs` as `[n, re, im]`
/// triples; the projections take `symbol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportItem {
    pub name: String,
    pub kind: ExportKind,
    pub dim: usize,
    #[serde(default)]
    pub coeffs: Vec<[f64; 3]>,
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default = "default_zero_count")]
    pub zero_count: usize,
    #[serde(default)]
    pub phi: Option<SymbolSpec>,
    #[serde(default)]
    pub psi: Option<SymbolSpec>,
    /// Truncation dims; the meaning depends on the command.
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    /// Explicit probe radii; overrides `radii_levels`.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub radii_levels: Option<u32>,
    #[serde(default = "default_angular")]
    pub angular_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_guard")]
    pub guard: usize,
    #[serde(default)]
    pub defect_sign: DefectSign,
    #[serde(default = "default_variables")]
    pub variables: usize,
    /// Degrees of generated symbols for `rank` when `phi`/`psi` are absent.
    #[serde(default)]
    pub degrees: Option<[usize; 2]>,
    /// Number of random pairs in the `verify` corpus.
    #[serde(default = "default_corpus_size")]
    pub corpus_size: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub export: Vec<ExportItem>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_zero_count() -> usize {
    30
}
fn default_angular() -> usize {
    256
}
fn default_guard() -> usize {
    8
}
fn default_variables() -> usize {
    2
}
fn default_corpus_size() -> usize {
    20
}
fn default_seed() -> u64 {
    20240917
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str(r#"{"schema_version": 1}"#).expect("defaults deserialize")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Checks the invariants that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("s", t.s),
            ("c", t.c),
            ("wc", t.wc),
            ("trend_slack", t.trend_slack),
            ("s_floor", t.s_floor),
            ("stability", t.stability),
            ("rank_rel", t.rank_rel),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if let Some(d) = &self.dims {
            if d.is_empty() || d.contains(&0) {
                return Err(CliError::Config("dims must be a nonempty list of positive integers".into()));
            }
            if d.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Config("dims must be strictly increasing".into()));
            }
        }
        if let Some(r) = &self.radii {
            if r.is_empty() {
                return Err(CliError::Config("radii list is empty".into()));
            }
            if r.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                return Err(CliError::Config("radii must lie in (0, 1)".into()));
            }
            if r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Config("radii must be strictly increasing".into()));
            }
        }
        if self.radii_levels == Some(0) {
            return Err(CliError::Config("radii_levels must be at least 1".into()));
        }
        if self.angular_samples < 8 {
            return Err(CliError::Config(format!("angular_samples must be at least 8, got {}", self.angular_samples)));
        }
        if self.zero_count == 0 {
            return Err(CliError::Config("zero_count must be positive".into()));
        }
        if !(2..=3).contains(&self.variables) {
            return Err(CliError::Config(format!("variables must be 2 or 3, got {}", self.variables)));
        }
        for (label, spec) in [("phi", &self.phi), ("psi", &self.psi)] {
            if let Some(s) = spec {
                s.to_blaschke(label)?;
                if s.variable == 0 {
                    return Err(CliError::Config(format!("{label}: variables are numbered from 1")));
                }
            }
        }
        Ok(())
    }

    /// `phi` and `psi` from the config, required for the custom scenario.
    pub fn custom_pair(&self) -> Result<Option<SymbolPair>, CliError> {
        match (&self.phi, &self.psi) {
            (Some(a), Some(b)) => Ok(Some((a.to_blaschke("phi")?, b.to_blaschke("psi")?))),
            (None, None) => Ok(None),
            _ => Err(CliError::Config("phi and psi must be given together".into())),
        }
    }
}
