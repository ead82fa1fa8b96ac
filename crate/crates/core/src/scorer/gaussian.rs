//! Diagonal-Gaussian scorer over kinematic window features.
//!
//! Each window is summarized by 51 numbers: the mean frame-to-frame
//! displacement of every joint (17) followed by the mean normalized pose
//! (34). Per-feature running moments are kept with Welford/Chan updates,
//! and a window scores as its diagonal Mahalanobis distance from the mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NUM_KEYPOINTS;
use crate::preprocess::PoseWindow;

pub const FEATURE_DIM: usize = NUM_KEYPOINTS * 3;
pub const VARIANCE_FLOOR: f64 = 1e-8;

/// Kinematic summary of a window; see the module docs for the layout.
pub fn kinematic_features(window: &PoseWindow) -> Vec<f64> {
    let mut feat = vec![0.0; FEATURE_DIM];
    let n = window.features.len();
    if n >= 2 {
        for pair in window.features.windows(2) {
            for j in 0..NUM_KEYPOINTS {
                let dx = pair[1][j][0] - pair[0][j][0];
                let dy = pair[1][j][1] - pair[0][j][1];
                feat[j] += dx.hypot(dy);
            }
        }
        for v in &mut feat[..NUM_KEYPOINTS] {
            *v /= (n - 1) as f64;
        }
    }
    if n >= 1 {
        for pose in &window.features {
            for j in 0..NUM_KEYPOINTS {
                feat[NUM_KEYPOINTS + 2 * j] += pose[j][0];
                feat[NUM_KEYPOINTS + 2 * j + 1] += pose[j][1];
            }
        }
        for v in &mut feat[NUM_KEYPOINTS..] {
            *v /= n as f64;
        }
    }
    feat
}

/// Running per-feature mean and sum of squared deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = v - *m;
            *m += delta / n;
            *s += delta * (v - *m);
        }
    }

    /// Moments of a batch, computed with two passes.
    pub fn from_batch(dim: usize, rows: &[Vec<f64>]) -> Self {
        let mut out = Self::new(dim);
        if rows.is_empty() {
            return out;
        }
        let n = rows.len() as f64;
        for row in rows {
            for (m, v) in out.mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut out.mean {
            *m /= n;
        }
        for row in rows {
            for ((s, m), v) in out.m2.iter_mut().zip(&out.mean).zip(row) {
                let d = v - m;
                *s += d * d;
            }
        }
        out.count = rows.len() as u64;
        out
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    /// Sample variance; zero below two observations.
    pub fn variance(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![0.0; self.mean.len()];
        }
        let d = (self.count - 1) as f64;
        self.m2.iter().map(|s| (s / d).max(0.0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianScorer {
    pub moments: Moments,
}

impl Default for GaussianScorer {
    fn default() -> Self {
        Self::new()
    }
}

impl GaussianScorer {
    pub fn new() -> Self {
        Self {
            moments: Moments::new(FEATURE_DIM),
        }
    }

    pub fn windows_seen(&self) -> u64 {
        self.moments.count
    }

    pub fn fit(&mut self, windows: &[PoseWindow]) {
        self.moments = Moments::new(FEATURE_DIM);
        self.partial_fit(windows);
    }

    /// Folds a batch into the running moments.
    pub fn partial_fit(&mut self, windows: &[PoseWindow]) {
        let rows: Vec<Vec<f64>> = windows.iter().map(kinematic_features).collect();
        self.partial_fit_features(&rows);
    }

    pub fn partial_fit_features(&mut self, rows: &[Vec<f64>]) {
        let batch = Moments::from_batch(FEATURE_DIM, rows);
        self.moments.merge(&batch);
    }

    pub fn score(&self, window: &PoseWindow) -> Result<f64> {
        self.score_features(&kinematic_features(window))
    }

    /// Diagonal Mahalanobis distance with the variance floored at 1e-8.
    pub fn score_features(&self, x: &[f64]) -> Result<f64> {
        if self.moments.count < 2 {
            return Err(Error::Scorer(format!(
                "gaussian scorer needs at least 2 windows, has {}",
                self.moments.count
            )));
        }
        let var = self.moments.variance();
        let d2: f64 = x
            .iter()
            .zip(&self.moments.mean)
            .zip(&var)
            .map(|((v, m), s)| (v - m).powi(2) / s.max(VARIANCE_FLOOR))
            .sum();
        Ok(d2.sqrt())
    }
}
