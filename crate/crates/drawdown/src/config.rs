//! JSON run configuration.
//!
//! Every section is optional except `scheme`; missing model fields take the
//! reference values `η = 3, θ = 4, σ = 2, r = 0.3, d = 5`. Unknown keys are
//! rejected.

use std::path::{Path, PathBuf};

use drawdown_core::sim::MaxTracking;
use drawdown_core::{GridSpec, ModelParams, ObservationScheme, PathConfig, Retention, Sampler};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub validate: ValidateConfig,
    #[serde(default)]
    pub figures: Vec<Variant>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub eta: f64,
    pub theta: f64,
    pub sigma: f64,
    pub r: f64,
    pub d: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            eta: 3.0,
            theta: 4.0,
            sigma: 2.0,
            r: 0.3,
            d: 5.0,
        }
    }
}

impl ModelConfig {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.eta, self.theta, self.sigma, self.r, self.d).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SchemeConfig {
    Poisson {
        rho: f64,
    },
    Deterministic {
        #[serde(rename = "T")]
        period: f64,
    },
}

impl SchemeConfig {
    pub fn scheme(&self) -> Result<ObservationScheme, CliError> {
        let scheme = match *self {
            SchemeConfig::Poisson { rho } => ObservationScheme::poisson(rho),
            SchemeConfig::Deterministic { period } => ObservationScheme::deterministic(period),
        };
        scheme.map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Poisson: intervals on `[0, a]`. Deterministic: nodes per band.
    pub n_base: usize,
    /// Deterministic only: number of replicated bands above the base band.
    #[serde(rename = "K")]
    pub k_bands: usize,
    #[serde(rename = "M")]
    pub m_retention: usize,
    /// Poisson only: truncation level; defaults to `8 d`.
    pub a: Option<f64>,
    pub eps: f64,
    pub max_iters: Option<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        let spec = GridSpec::default();
        Self {
            n_base: spec.n_base,
            k_bands: spec.k_bands,
            m_retention: spec.m_retention,
            a: spec.truncation,
            eps: spec.eps,
            max_iters: spec.max_iters,
        }
    }
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            n_base: self.n_base,
            k_bands: self.k_bands,
            m_retention: self.m_retention,
            eps: self.eps,
            truncation: self.a,
            max_iters: self.max_iters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerConfig {
    Euler,
    ExactInverseCdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxTrackingConfig {
    Grid,
    Bridge,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub horizon_cutoff: f64,
    pub seed: u64,
    pub sampler: SamplerConfig,
    pub max_tracking: MaxTrackingConfig,
    /// Initial drawdowns at which `simulate` estimates the policy value.
    pub z0: Vec<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        let cfg = PathConfig::default();
        Self {
            n_paths: cfg.n_paths,
            dt: cfg.dt,
            horizon_cutoff: cfg.horizon_cutoff,
            seed: cfg.seed,
            sampler: SamplerConfig::ExactInverseCdf,
            max_tracking: MaxTrackingConfig::Bridge,
            z0: vec![0.0, 2.5, 5.0, 7.5],
        }
    }
}

impl SimConfig {
    pub fn path_config(&self, seed: u64) -> Result<PathConfig, CliError> {
        let cfg = PathConfig {
            n_paths: self.n_paths,
            dt: self.dt,
            horizon_cutoff: self.horizon_cutoff,
            seed,
            sampler: match self.sampler {
                SamplerConfig::Euler => Sampler::Euler,
                SamplerConfig::ExactInverseCdf => Sampler::ExactInverseCdf,
            },
            max_tracking: match self.max_tracking {
                MaxTrackingConfig::Grid => MaxTracking::Grid,
                MaxTrackingConfig::Bridge => MaxTracking::Bridge,
            },
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(z) = self.z0.iter().find(|z| !(**z >= 0.0 && z.is_finite())) {
            return Err(CliError::Config(format!("z0 = {z} must be a non-negative number")));
        }
        Ok(cfg)
    }
}

/// Parameter grid of the drawdown-law check.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub b: Vec<f64>,
    pub z: Vec<f64>,
    pub t: Vec<f64>,
    pub n_paths: usize,
    pub dt: f64,
    pub threshold: f64,
    pub max_tracking: MaxTrackingConfig,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            b: vec![0.3, 1.0],
            z: vec![0.0, 1.0, 5.0],
            t: vec![0.5, 1.0],
            n_paths: 200_000,
            dt: 1e-4,
            threshold: 0.01,
            max_tracking: MaxTrackingConfig::Bridge,
        }
    }
}

impl ValidateConfig {
    pub fn check(&self) -> Result<(), CliError> {
        if self.n_paths == 0 {
            return Err(CliError::Config("validate.n_paths must be at least 1".into()));
        }
        if !(self.dt > 0.0) {
            return Err(CliError::Config("validate.dt must be positive".into()));
        }
        for &b in &self.b {
            Retention::new(b).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if self.z.iter().any(|z| !(*z >= 0.0)) {
            return Err(CliError::Config("validate.z entries must be non-negative".into()));
        }
        if self.t.iter().any(|t| !(*t > 0.0)) {
            return Err(CliError::Config("validate.t entries must be positive".into()));
        }
        Ok(())
    }
}

/// One curve of a figure sweep. Unset fields fall back to the top-level
/// configuration.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub scheme: Option<SchemeConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.model.params()?;
        cfg.scheme.scheme()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        self.model.params()
    }

    pub fn scheme(&self) -> Result<ObservationScheme, CliError> {
        self.scheme.scheme()
    }
}
