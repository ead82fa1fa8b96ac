//! Frame-level anomaly metrics: AUC-ROC, AUC-PR, EER and the false-positive
//! rate at a fixed 10% false-negative rate (10ER).
//!
//! Scores follow the convention *higher = more anomalous*. Every metric is
//! computed from the same threshold sweep: frames are flagged when their
//! score is `>=` the threshold, and equal scores always share a threshold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CameraDataset, Label};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub frame_index: u64,
    pub score: f64,
    pub label: Label,
}

/// Per-frame scores aligned with ground truth.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreSeries {
    pub entries: Vec<ScoreEntry>,
}

impl ScoreSeries {
    pub fn new(entries: Vec<ScoreEntry>) -> Self {
        Self { entries }
    }

    /// Builds a series from `(score, label)` pairs, numbering frames 0, 1, ...
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, Label)>) -> Self {
        Self {
            entries: pairs
                .into_iter()
                .enumerate()
                .map(|(i, (score, label))| ScoreEntry {
                    frame_index: i as u64,
                    score,
                    label,
                })
                .collect(),
        }
    }

    pub fn counts(&self) -> (usize, usize) {
        let pos = self.entries.iter().filter(|e| e.label.is_anomalous()).count();
        (pos, self.entries.len() - pos)
    }
}

/// The four benchmark metrics plus class counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub auc_roc: f64,
    pub auc_pr: f64,
    pub eer: f64,
    pub ten_er: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Frame score aggregation across overlapping windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Max,
    Mean,
}

/// Projects window scores onto frames. Frames no window covers receive the
/// smallest window score seen (0 when there are no windows).
pub fn aggregate_frame_scores(
    window_scores: &[(Vec<u64>, f64)],
    frames: &CameraDataset,
    aggregator: Aggregator,
) -> Result<ScoreSeries> {
    if frames.is_empty() {
        return Err(Error::InvalidInput("cannot aggregate scores over an empty dataset".into()));
    }
    // frame_index -> (sum, max, count)
    let mut acc: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
    let mut min_score = f64::INFINITY;
    for (covered, score) in window_scores {
        if !score.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite window score {score}")));
        }
        min_score = min_score.min(*score);
        for f in covered {
            if frames.get(*f).is_none() {
                return Err(Error::InvalidInput(format!(
                    "window covers frame {f}, which is not in the dataset"
                )));
            }
            let e = acc.entry(*f).or_insert((0.0, f64::NEG_INFINITY, 0));
            e.0 += score;
            e.1 = e.1.max(*score);
            e.2 += 1;
        }
    }
    let fallback = if min_score.is_finite() { min_score } else { 0.0 };
    let entries = frames
        .frames()
        .iter()
        .map(|f| {
            let score = match acc.get(&f.frame_index) {
                Some(&(sum, max, n)) => match aggregator {
                    Aggregator::Max => max,
                    Aggregator::Mean => sum / n as f64,
                },
                None => fallback,
            };
            ScoreEntry {
                frame_index: f.frame_index,
                score,
                label: f.label,
            }
        })
        .collect();
    Ok(ScoreSeries { entries })
}

/// Confusion counts at one threshold (flag `score >= threshold`).
#[derive(Debug, Clone, Copy)]
struct OperatingPoint {
    tp: usize,
    fp: usize,
}

/// Cumulative operating points from "flag nothing" to "flag everything",
/// one per distinct score.
struct Sweep {
    points: Vec<OperatingPoint>,
    n_pos: usize,
    n_neg: usize,
}

impl Sweep {
    fn new(s: &ScoreSeries) -> Result<Self> {
        if let Some(e) = s.entries.iter().find(|e| !e.score.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite score at frame {}",
                e.frame_index
            )));
        }
        let mut sorted: Vec<(f64, bool)> = s
            .entries
            .iter()
            .map(|e| (e.score, e.label.is_anomalous()))
            .collect();
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        let n_pos = sorted.iter().filter(|(_, p)| *p).count();
        let n_neg = sorted.len() - n_pos;
        let mut points = vec![OperatingPoint { tp: 0, fp: 0 }];
        let (mut tp, mut fp) = (0, 0);
        let mut i = 0;
        while i < sorted.len() {
            let score = sorted[i].0;
            while i < sorted.len() && sorted[i].0 == score {
                if sorted[i].1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
                i += 1;
            }
            points.push(OperatingPoint { tp, fp });
        }
        Ok(Self { points, n_pos, n_neg })
    }

    fn require_both(&self, metric: &str) -> Result<()> {
        if self.n_pos == 0 || self.n_neg == 0 {
            return Err(Error::MetricUndefined(format!(
                "{metric} needs both labels ({} anomalous, {} normal)",
                self.n_pos, self.n_neg
            )));
        }
        Ok(())
    }

    fn rates(&self, p: &OperatingPoint) -> (f64, f64) {
        let fpr = p.fp as f64 / self.n_neg as f64;
        let fnr = (self.n_pos - p.tp) as f64 / self.n_pos as f64;
        (fpr, fnr)
    }

    fn auc_roc(&self) -> Result<f64> {
        self.require_both("AUC-ROC")?;
        // Trapezoids in count space, normalized once at the end.
        let mut area = 0.0;
        for w in self.points.windows(2) {
            let dx = (w[1].fp - w[0].fp) as f64;
            area += dx * (w[0].tp + w[1].tp) as f64 / 2.0;
        }
        Ok(area / (self.n_pos as f64 * self.n_neg as f64))
    }

    fn auc_pr(&self) -> Result<f64> {
        if self.n_pos == 0 {
            return Err(Error::MetricUndefined("AUC-PR needs at least one anomalous frame".into()));
        }
        let mut ap = 0.0;
        for w in self.points.windows(2) {
            let d_tp = w[1].tp - w[0].tp;
            if d_tp > 0 {
                let precision = w[1].tp as f64 / (w[1].tp + w[1].fp) as f64;
                ap += d_tp as f64 / self.n_pos as f64 * precision;
            }
        }
        Ok(ap)
    }

    fn eer(&self) -> Result<f64> {
        self.require_both("EER")?;
        // Compare in integer count space, scaled by n_pos * n_neg, so equal
        // gaps are recognized exactly: fpr = fp/n_neg, fnr = fn/n_pos.
        let (np, nn) = (self.n_pos as u128, self.n_neg as u128);
        let mut best: Option<(u128, u128)> = None;
        for p in &self.points {
            let a = p.fp as u128 * np;
            let b = (self.n_pos - p.tp) as u128 * nn;
            let gap = a.abs_diff(b);
            let sum = a + b;
            if best.is_none_or(|(g, s)| gap < g || (gap == g && sum < s)) {
                best = Some((gap, sum));
            }
        }
        let (_, sum) = best.expect("sweep has at least one point");
        Ok(sum as f64 / (2.0 * np as f64 * nn as f64))
    }

    fn fpr_at_fnr(&self, target_fnr: f64) -> Result<f64> {
        self.require_both("FPR at fixed FNR")?;
        if !(0.0..1.0).contains(&target_fnr) {
            return Err(Error::InvalidInput(format!("target FNR {target_fnr} outside [0,1)")));
        }
        // The "flag everything" point has FNR 0, so the set is never empty.
        Ok(self
            .points
            .iter()
            .map(|p| self.rates(p))
            .filter(|(_, fnr)| *fnr <= target_fnr)
            .map(|(fpr, _)| fpr)
            .fold(f64::INFINITY, f64::min))
    }
}

/// Area under the ROC curve; positive/negative ties count one half.
pub fn auc_roc(s: &ScoreSeries) -> Result<f64> {
    Sweep::new(s)?.auc_roc()
}

/// Average precision, `sum_i (R_i - R_{i-1}) * P_i` over distinct thresholds.
pub fn auc_pr(s: &ScoreSeries) -> Result<f64> {
    Sweep::new(s)?.auc_pr()
}

/// Equal error rate at the realizable operating point nearest to FPR = FNR.
pub fn eer(s: &ScoreSeries) -> Result<f64> {
    Sweep::new(s)?.eer()
}

/// Smallest FPR among operating points whose FNR is at most `target_fnr`.
pub fn fpr_at_fnr(s: &ScoreSeries, target_fnr: f64) -> Result<f64> {
    Sweep::new(s)?.fpr_at_fnr(target_fnr)
}

/// 10ER: [`fpr_at_fnr`] at a 10% false-negative rate.
pub fn ten_er(s: &ScoreSeries) -> Result<f64> {
    fpr_at_fnr(s, 0.10)
}

pub fn compute_all(s: &ScoreSeries) -> Result<MetricReport> {
    let sweep = Sweep::new(s)?;
    Ok(MetricReport {
        auc_roc: sweep.auc_roc()?,
        auc_pr: sweep.auc_pr()?,
        eer: sweep.eer()?,
        ten_er: sweep.fpr_at_fnr(0.10)?,
        n_pos: sweep.n_pos,
        n_neg: sweep.n_neg,
    })
}
