//! Analysis configuration, loadable from TOML.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::DEFAULT_MAX_DENSE_ROWS;
use crate::classical::{ExternalConfig, IpmConfig};
use crate::cost::DurationGrid;
use crate::error::{Error, Result};
use crate::spectral::sparsity::DEFAULT_PROBE_BUDGET;
use crate::spectral::SpectralConfig;

/// Environment variable naming a default configuration file.
pub const CONFIG_ENV: &str = "QIPM_BOUND_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub seed: u64,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
    pub epsilon: f64,
    pub sigma_max_iters: usize,
    pub sigma_max_tol: f64,
    pub sigma_min_max_iters: usize,
    pub sigma_min_residual_tol: f64,
    pub sigma_min_timeout_s: f64,
    pub sigma_min_samples: usize,
    pub force_sampling: bool,
    pub probe_budget: usize,
    pub max_dense_rows: usize,
    pub durations: DurationGrid,
    pub ipm: IpmConfig,
    /// External classical solver; the internal IPM is used when absent.
    pub external: Option<ExternalConfig>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let spectral = SpectralConfig::default();
        AnalysisConfig {
            seed: 0,
            workers: 0,
            epsilon: 0.1,
            sigma_max_iters: spectral.max_iters,
            sigma_max_tol: spectral.tol,
            sigma_min_max_iters: spectral.min_max_iters,
            sigma_min_residual_tol: spectral.min_residual_tol,
            sigma_min_timeout_s: spectral.timeout.as_secs_f64(),
            sigma_min_samples: spectral.n_samples,
            force_sampling: false,
            probe_budget: DEFAULT_PROBE_BUDGET,
            max_dense_rows: DEFAULT_MAX_DENSE_ROWS,
            durations: DurationGrid::default(),
            ipm: IpmConfig::default(),
            external: None,
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<AnalysisConfig> {
        let cfg: AnalysisConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<AnalysisConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.sigma_min_timeout_s >= 0.0 && self.sigma_min_timeout_s.is_finite()) {
            return Err(Error::Config("sigma_min_timeout_s must be finite and non-negative".into()));
        }
        self.durations.durations()?;
        Ok(())
    }

    pub fn spectral(&self, seed: u64) -> SpectralConfig {
        SpectralConfig {
            max_iters: self.sigma_max_iters,
            tol: self.sigma_max_tol,
            min_max_iters: self.sigma_min_max_iters,
            min_residual_tol: self.sigma_min_residual_tol,
            timeout: Duration::from_secs_f64(self.sigma_min_timeout_s),
            n_samples: self.sigma_min_samples,
            seed,
            force_sampling: self.force_sampling,
        }
    }

    /// SHA-256 of the JSON serialization with `workers` zeroed, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&AnalysisConfig { workers: 0, ..self.clone() }).expect("config serializes");
        hex_digest(json.as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Per-instance seed from the suite seed and the instance name.
pub fn instance_seed(suite_seed: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(suite_seed.to_le_bytes());
    h.update(name.as_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}
