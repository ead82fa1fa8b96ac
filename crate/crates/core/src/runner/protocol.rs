//! Standard (train once, test once) and continual (pretrain, then learn
//! slice by slice) evaluation protocols.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{aggregate_frame_scores, compute_all, Aggregator, MetricReport, ScoreSeries};
use crate::model::{group_tracks, CameraDataset, FrameRecord, SplitSet};
use crate::preprocess::{prepare_windows, PoseWindow, WindowingParams};
use crate::rearrange::{rearrange, ContinualSplit};
use crate::scorer::{AnomalyScorer, Scorer};
use crate::seed::derive_seed;

use super::config::RunConfig;

/// Windows of every track in `dataset`.
pub fn extract_windows(dataset: &CameraDataset, params: &WindowingParams) -> Result<Vec<PoseWindow>> {
    prepare_windows(&group_tracks(dataset)?, params)
}

/// Windows of an arbitrary set of frames from one camera.
pub fn frames_windows(camera_id: &str, frames: &[FrameRecord], params: &WindowingParams) -> Result<Vec<PoseWindow>> {
    let ds = CameraDataset::from_frames(camera_id, frames.to_vec())?;
    extract_windows(&ds, params)
}

/// Scores `windows` and evaluates frame-level metrics on `test`.
///
/// Interpolation can bridge frames that are not part of the test set (for
/// instance frames moved to a training stream); those covered frames are
/// ignored.
pub fn evaluate(
    scorer: &Scorer,
    test: &CameraDataset,
    windows: &[PoseWindow],
    aggregator: Aggregator,
) -> Result<(MetricReport, ScoreSeries)> {
    let mut scored = Vec::with_capacity(windows.len());
    for w in windows {
        let covered: Vec<u64> = w
            .covered_frames
            .iter()
            .copied()
            .filter(|f| test.get(*f).is_some())
            .collect();
        if covered.is_empty() {
            continue;
        }
        scored.push((covered, scorer.score(w)?));
    }
    let series = aggregate_frame_scores(&scored, test, aggregator)?;
    Ok((compute_all(&series)?, series))
}

/// Seed given to stochastic scorers.
pub fn scorer_seed(run_seed: u64) -> u64 {
    derive_seed(run_seed, "scorer")
}

/// Seed used for rearrangement sampling.
pub fn rearrange_seed(run_seed: u64) -> u64 {
    derive_seed(run_seed, "rearrange")
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardOutcome {
    pub report: MetricReport,
    pub scores: ScoreSeries,
}

/// Fits a fresh scorer on the (normal-only) training side and evaluates it
/// once on the test side.
pub fn run_standard(split: &SplitSet, cfg: &RunConfig) -> Result<StandardOutcome> {
    cfg.validate()?;
    if split.train.is_empty() {
        return Err(Error::InvalidInput("training set is empty".into()));
    }
    if split.test.is_empty() {
        return Err(Error::InvalidInput("test set is empty".into()));
    }
    if !split.is_standard() {
        return Err(Error::InvalidInput("standard protocol requires a normal-only training set".into()));
    }
    let params = cfg.windowing();
    let train_windows = extract_windows(&split.train, &params)?;
    if train_windows.is_empty() {
        return Err(Error::InvalidInput(format!(
            "training set yields no windows of length {}",
            params.length
        )));
    }
    let mut scorer = cfg.scorer.build(scorer_seed(cfg.seed))?;
    scorer.fit(&train_windows)?;
    let test_windows = extract_windows(&split.test, &params)?;
    let (report, scores) = evaluate(&scorer, &split.test, &test_windows, cfg.aggregator)?;
    Ok(StandardOutcome { report, scores })
}

/// Summary of one camera's continual run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinualResult {
    pub camera_id: String,
    /// Pretrained scorer, before any target-camera data.
    pub baseline: MetricReport,
    /// One report per slice, after training on slices `1..=i`.
    pub per_step: Vec<MetricReport>,
    pub ucal_average: MetricReport,
    /// Best value of each metric over the steps, chosen independently.
    pub ucal_best: MetricReport,
    /// Fresh scorer fitted once on the whole training stream.
    pub normal_training: MetricReport,
    pub pretrain_windows: u64,
    pub step_windows: Vec<u64>,
    /// Scorer's ingested-window count after each step.
    pub windows_seen: Vec<u64>,
}

/// Per-metric mean and best over the steps. Class counts are taken from
/// the first step (every step shares the test set).
pub fn summarize(per_step: &[MetricReport]) -> Result<(MetricReport, MetricReport)> {
    let first = per_step
        .first()
        .ok_or_else(|| Error::InvalidInput("no steps to summarize".into()))?;
    let n = per_step.len() as f64;
    let mean = |f: fn(&MetricReport) -> f64| per_step.iter().map(f).sum::<f64>() / n;
    let max = |f: fn(&MetricReport) -> f64| per_step.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let min = |f: fn(&MetricReport) -> f64| per_step.iter().map(f).fold(f64::INFINITY, f64::min);
    let avg = MetricReport {
        auc_roc: mean(|r| r.auc_roc),
        auc_pr: mean(|r| r.auc_pr),
        eer: mean(|r| r.eer),
        ten_er: mean(|r| r.ten_er),
        n_pos: first.n_pos,
        n_neg: first.n_neg,
    };
    let best = MetricReport {
        auc_roc: max(|r| r.auc_roc),
        auc_pr: max(|r| r.auc_pr),
        eer: min(|r| r.eer),
        ten_er: min(|r| r.ten_er),
        n_pos: first.n_pos,
        n_neg: first.n_neg,
    };
    Ok((avg, best))
}

/// Everything a continual run produces besides the checkpoints on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinualOutcome {
    pub result: ContinualResult,
    pub split: ContinualSplit,
    pub baseline_scores: ScoreSeries,
    pub step_scores: Vec<ScoreSeries>,
    pub normal_training_scores: ScoreSeries,
}

/// Path of the checkpoint written after step `step` (1-based).
pub fn checkpoint_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("step_{step}.ckpt"))
}

/// Rearranges `split` with the configured plan and runs the continual
/// protocol. The plan's seed is derived from the run seed.
///
/// When `checkpoint_dir` is given, the scorer state after each step is
/// written there as `step_<i>.ckpt`.
pub fn run_continual(
    origin: &[CameraDataset],
    split: &SplitSet,
    cfg: &RunConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<ContinualOutcome> {
    cfg.validate()?;
    let mut plan = cfg
        .rearrange
        .clone()
        .ok_or_else(|| Error::Config("continual mode requires a rearrange plan".into()))?;
    plan.seed = rearrange_seed(cfg.seed);
    let cs = rearrange(split, &plan)?;
    run_continual_split(origin, cs, cfg, checkpoint_dir)
}

/// Continual protocol on an already rearranged split.
pub fn run_continual_split(
    origin: &[CameraDataset],
    cs: ContinualSplit,
    cfg: &RunConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<ContinualOutcome> {
    let params = cfg.windowing();
    let mut origin_windows = Vec::new();
    for ds in origin {
        origin_windows.extend(extract_windows(ds, &params)?);
    }
    if origin_windows.is_empty() {
        return Err(Error::InvalidInput("origin dataset is missing or yields no windows".into()));
    }
    if let Some(dir) = checkpoint_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }

    let test_windows = extract_windows(&cs.test, &params)?;
    let seed = scorer_seed(cfg.seed);

    let mut scorer = cfg.scorer.build(seed)?;
    scorer.fit(&origin_windows)?;
    let (baseline, baseline_scores) = evaluate(&scorer, &cs.test, &test_windows, cfg.aggregator)?;

    let mut per_step = Vec::with_capacity(cs.slice_bounds.len());
    let mut step_scores = Vec::with_capacity(cs.slice_bounds.len());
    let mut step_windows = Vec::with_capacity(cs.slice_bounds.len());
    let mut windows_seen = Vec::with_capacity(cs.slice_bounds.len());
    for (i, slice) in cs.slices().enumerate() {
        let windows = frames_windows(&cs.camera_id, slice, &params)?;
        scorer.partial_fit(&windows)?;
        step_windows.push(windows.len() as u64);
        windows_seen.push(scorer.windows_seen());
        let snap = scorer.snapshot();
        if let Some(dir) = checkpoint_dir {
            snap.save(checkpoint_path(dir, i + 1))?;
        }
        let (report, scores) = evaluate(&snap, &cs.test, &test_windows, cfg.aggregator)?;
        per_step.push(report);
        step_scores.push(scores);
    }

    let stream_windows = frames_windows(&cs.camera_id, &cs.train_stream, &params)?;
    let mut fresh = cfg.scorer.build(seed)?;
    fresh.fit(&stream_windows)?;
    let (normal_training, normal_training_scores) =
        evaluate(&fresh, &cs.test, &test_windows, cfg.aggregator)?;

    let (ucal_average, ucal_best) = summarize(&per_step)?;
    Ok(ContinualOutcome {
        result: ContinualResult {
            camera_id: cs.camera_id.clone(),
            baseline,
            per_step,
            ucal_average,
            ucal_best,
            normal_training,
            pretrain_windows: origin_windows.len() as u64,
            step_windows,
            windows_seen,
        },
        split: cs,
        baseline_scores,
        step_scores,
        normal_training_scores,
    })
}

/// Re-evaluates a persisted step checkpoint on the continual test set.
pub fn replay_checkpoint(path: impl AsRef<Path>, test: &CameraDataset, cfg: &RunConfig) -> Result<MetricReport> {
    let scorer = Scorer::load(path)?;
    let windows = extract_windows(test, &cfg.windowing())?;
    Ok(evaluate(&scorer, test, &windows, cfg.aggregator)?.0)
}
