//! Pluggable anomaly scorers.
//!
//! A scorer is fitted on unlabeled windows, can keep learning incrementally,
//! and maps a window to a real score where higher means more anomalous.
//! State can be captured and restored so evaluation never perturbs the
//! training timeline, and serialized to a versioned checkpoint.

pub mod gaussian;
pub mod knn;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::PoseWindow;

pub use gaussian::GaussianScorer;
pub use knn::KnnScorer;

/// Behavior every scorer provides to the protocol runner.
pub trait AnomalyScorer {
    /// Discards prior state and fits on `windows`.
    fn fit(&mut self, windows: &[PoseWindow]) -> Result<()>;
    /// Updates the current state with `windows`.
    fn partial_fit(&mut self, windows: &[PoseWindow]) -> Result<()>;
    fn score(&self, window: &PoseWindow) -> Result<f64>;
    /// Total windows ingested since the last `fit`.
    fn windows_seen(&self) -> u64;
}

/// Scorer configuration as it appears in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
#[derive(Default)]
pub enum ScorerSpec {
    #[default]
    Gaussian,
    Knn {
        #[serde(default = "default_k_nn")]
        k_nn: usize,
        #[serde(default = "default_capacity")]
        capacity: usize,
    },
    /// Scores every window with the same value.
    Constant {
        #[serde(default)]
        value: f64,
    },
}

fn default_k_nn() -> usize {
    5
}

fn default_capacity() -> usize {
    knn::DEFAULT_CAPACITY
}

impl ScorerSpec {
    /// A fresh, untrained scorer. `seed` only matters for stochastic scorers.
    pub fn build(&self, seed: u64) -> Result<Scorer> {
        Ok(match self {
            ScorerSpec::Gaussian => Scorer::Gaussian(GaussianScorer::new()),
            ScorerSpec::Knn { k_nn, capacity } => Scorer::Knn(KnnScorer::new(*k_nn, *capacity, seed)?),
            ScorerSpec::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::Config("constant scorer value must be finite".into()));
                }
                Scorer::Constant(ConstantScorer { value: *value, seen: 0 })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantScorer {
    pub value: f64,
    pub seen: u64,
}

/// Closed set of built-in scorers; its serialized form is the checkpoint body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum Scorer {
    Gaussian(GaussianScorer),
    Knn(KnnScorer),
    Constant(ConstantScorer),
}

impl AnomalyScorer for Scorer {
    fn fit(&mut self, windows: &[PoseWindow]) -> Result<()> {
        match self {
            Scorer::Gaussian(g) => g.fit(windows),
            Scorer::Knn(k) => k.fit(windows),
            Scorer::Constant(c) => c.seen = windows.len() as u64,
        }
        Ok(())
    }

    fn partial_fit(&mut self, windows: &[PoseWindow]) -> Result<()> {
        match self {
            Scorer::Gaussian(g) => g.partial_fit(windows),
            Scorer::Knn(k) => k.partial_fit(windows),
            Scorer::Constant(c) => c.seen += windows.len() as u64,
        }
        Ok(())
    }

    fn score(&self, window: &PoseWindow) -> Result<f64> {
        match self {
            Scorer::Gaussian(g) => g.score(window),
            Scorer::Knn(k) => k.score(window),
            Scorer::Constant(c) => Ok(c.value),
        }
    }

    fn windows_seen(&self) -> u64 {
        match self {
            Scorer::Gaussian(g) => g.windows_seen(),
            Scorer::Knn(k) => k.windows_seen(),
            Scorer::Constant(c) => c.seen,
        }
    }
}

pub const CHECKPOINT_FORMAT: &str = "posevad-scorer";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    scorer: Scorer,
}

impl Scorer {
    /// Independent copy of the current state.
    pub fn snapshot(&self) -> Scorer {
        self.clone()
    }

    /// Replaces the current state with a snapshot.
    pub fn restore(&mut self, snapshot: &Scorer) {
        *self = snapshot.clone();
    }

    pub fn to_checkpoint(&self) -> Result<Vec<u8>> {
        let ckpt = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            scorer: self.clone(),
        };
        serde_json::to_vec(&ckpt).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn from_checkpoint(bytes: &[u8]) -> Result<Scorer> {
        let ckpt: Checkpoint =
            serde_json::from_slice(bytes).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unknown checkpoint format {:?}", ckpt.format)));
        }
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        ckpt.scorer.check()?;
        Ok(ckpt.scorer)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_checkpoint()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scorer> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Scorer::from_checkpoint(&bytes)
    }

    /// Structural checks on deserialized state.
    fn check(&self) -> Result<()> {
        match self {
            Scorer::Gaussian(g) => {
                let m = &g.moments;
                if m.mean.len() != gaussian::FEATURE_DIM || m.m2.len() != gaussian::FEATURE_DIM {
                    return Err(Error::Checkpoint("gaussian moments have the wrong dimension".into()));
                }
                if m.m2.iter().any(|v| *v < 0.0 || !v.is_finite()) || m.mean.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Checkpoint("gaussian moments are not finite/non-negative".into()));
                }
            }
            Scorer::Knn(k) => {
                if k.k_nn == 0 || k.capacity == 0 || k.stored.len() > k.capacity {
                    return Err(Error::Checkpoint("knn reservoir parameters are inconsistent".into()));
                }
                if (k.stored.len() as u64) > k.seen {
                    return Err(Error::Checkpoint("knn reservoir holds more vectors than it has seen".into()));
                }
            }
            Scorer::Constant(c) => {
                if !c.value.is_finite() {
                    return Err(Error::Checkpoint("constant scorer value is not finite".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NUM_KEYPOINTS;

    fn windows(offset: f64, n: usize) -> Vec<PoseWindow> {
        (0..n)
            .map(|i| PoseWindow {
                track_id: 0,
                camera_id: "C0".into(),
                start_frame: i as u64,
                length: 3,
                features: (0..3)
                    .map(|t| {
                        let mut p = [[0.0; 2]; NUM_KEYPOINTS];
                        for (j, xy) in p.iter_mut().enumerate() {
                            *xy = [offset + ((i * 7 + t * 3 + j) % 11) as f64 * 0.01, (j as f64) * 0.02];
                        }
                        p
                    })
                    .collect(),
                covered_frames: vec![0, 1, 2],
            })
            .collect()
    }

    #[test]
    fn snapshot_scores_like_original() {
        for spec in [ScorerSpec::Gaussian, ScorerSpec::Knn { k_nn: 2, capacity: 4 }] {
            let mut s = spec.build(1).unwrap();
            s.fit(&windows(0.0, 10)).unwrap();
            let snap = s.snapshot();
            let q = &windows(0.5, 1)[0];
            assert_eq!(snap.score(q).unwrap(), s.score(q).unwrap());

            let before = s.score(q).unwrap();
            s.partial_fit(&windows(0.5, 10)).unwrap();
            assert_ne!(s.score(q).unwrap(), before);
            let mut restored = spec.build(1).unwrap();
            restored.restore(&snap);
            assert_eq!(restored.score(q).unwrap(), before);
        }
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let mut s = ScorerSpec::Knn { k_nn: 1, capacity: 3 }.build(9).unwrap();
        s.fit(&windows(0.1, 7)).unwrap();
        let back = Scorer::from_checkpoint(&s.to_checkpoint().unwrap()).unwrap();
        assert_eq!(back, s);
        // The restored RNG continues the same reservoir decisions.
        let (mut a, mut b) = (s, back);
        a.partial_fit(&windows(0.3, 20)).unwrap();
        b.partial_fit(&windows(0.3, 20)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn checkpoint_version_checked() {
        let bad = br#"{"format":"posevad-scorer","version":99,"scorer":{"type":"constant","value":0.0,"seen":0}}"#;
        assert!(matches!(Scorer::from_checkpoint(bad), Err(Error::Checkpoint(_))));
        assert!(Scorer::from_checkpoint(b"garbage").is_err());
    }

    #[test]
    fn spec_parses_from_json() {
        let s: ScorerSpec = serde_json::from_str(r#"{"type":"knn","k_nn":3}"#).unwrap();
        assert_eq!(s, ScorerSpec::Knn { k_nn: 3, capacity: knn::DEFAULT_CAPACITY });
        let g: ScorerSpec = serde_json::from_str(r#"{"type":"gaussian"}"#).unwrap();
        assert_eq!(g, ScorerSpec::Gaussian);
    }
}
