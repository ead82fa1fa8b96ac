use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Aggregator;
use crate::preprocess::{WindowingParams, DEFAULT_MAX_GAP, DEFAULT_SMOOTH_WINDOW};
use crate::rearrange::RearrangePlan;
use crate::scorer::ScorerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Standard,
    Continual,
}

/// Run configuration. Every field has a default, so `{}` is a valid file.
///
/// ```json
/// {
///   "mode": "continual",
///   "camera": "C0",
///   "train": "data/train.jsonl",
///   "test": "data/test.jsonl",
///   "origin": "data/origin.jsonl",
///   "scorer": {"type": "gaussian"},
///   "window_length": 24,
///   "window_stride": 6,
///   "max_gap": 14,
///   "smooth_window": 15,
///   "aggregator": "max",
///   "rearrange": {"k": 9, "target_train_anomaly_ratio": 0.01, "balance_tolerance": 0.002},
///   "seed": 0,
///   "out_dir": "runs/c0"
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Keep only frames of this camera from the input files.
    pub camera: Option<String>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Pretraining data for continual runs.
    pub origin: Option<PathBuf>,
    pub scorer: ScorerSpec,
    pub window_length: usize,
    pub window_stride: usize,
    pub max_gap: u64,
    /// Centered smoothing window; `null` disables smoothing.
    pub smooth_window: Option<usize>,
    pub aggregator: Aggregator,
    /// Required in continual mode. Its `seed` is replaced by one derived
    /// from the run seed.
    pub rearrange: Option<RearrangePlan>,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Standard,
            camera: None,
            train: None,
            test: None,
            origin: None,
            scorer: ScorerSpec::Gaussian,
            window_length: 24,
            window_stride: 6,
            max_gap: DEFAULT_MAX_GAP,
            smooth_window: Some(DEFAULT_SMOOTH_WINDOW),
            aggregator: Aggregator::Max,
            rearrange: None,
            seed: 0,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_length < 2 {
            return Err(Error::Config(format!(
                "window_length must be at least 2, got {}",
                self.window_length
            )));
        }
        if self.window_stride == 0 {
            return Err(Error::Config("window_stride must be at least 1".into()));
        }
        if let Some(w) = self.smooth_window {
            if w == 0 || w % 2 == 0 {
                return Err(Error::Config(format!("smooth_window must be odd, got {w}")));
            }
        }
        match (self.mode, &self.rearrange) {
            (Mode::Continual, None) => {
                return Err(Error::Config("continual mode requires a rearrange plan".into()))
            }
            (_, Some(plan)) => plan.validate()?,
            _ => {}
        }
        Ok(())
    }

    pub fn windowing(&self) -> WindowingParams {
        WindowingParams {
            length: self.window_length,
            stride: self.window_stride,
            max_gap: self.max_gap,
            smooth_window: self.smooth_window,
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        crate::seed::sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }
}
