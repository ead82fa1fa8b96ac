//! Pose post-processing: gap interpolation, temporal smoothing,
//! bbox-relative normalization and sliding-window segmentation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundingBox, Keypoint, PersonObservation, Track, NUM_KEYPOINTS};

/// Default longest gap (in missing frames) that interpolation fills.
pub const DEFAULT_MAX_GAP: u64 = 14;
/// Default centered smoothing window.
pub const DEFAULT_SMOOTH_WINDOW: usize = 15;

/// Normalized 17-joint pose, `[x, y]` per joint.
pub type Pose = [[f64; 2]; NUM_KEYPOINTS];

/// A fixed-length segment of one track, ready for scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseWindow {
    pub track_id: u64,
    pub camera_id: String,
    pub start_frame: u64,
    pub length: usize,
    /// One normalized pose per covered frame.
    pub features: Vec<Pose>,
    pub covered_frames: Vec<u64>,
}

impl PoseWindow {
    /// Flattens the features frame-major: `[f0.j0.x, f0.j0.y, f0.j1.x, ...]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.features
            .iter()
            .flat_map(|pose| pose.iter().flat_map(|xy| xy.iter().copied()))
            .collect()
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Fills internal gaps of at most `max_gap` missing frames by per-keypoint
/// linear interpolation. Inserted observations have null visibility and an
/// interpolated bbox. Longer gaps and the track ends are left untouched.
pub fn interpolate_track(track: &Track, max_gap: u64) -> Track {
    let mut observations = Vec::with_capacity(track.observations.len());
    for (i, (frame, obs)) in track.observations.iter().enumerate() {
        if i > 0 {
            let (prev_frame, prev) = &track.observations[i - 1];
            let gap = frame - prev_frame - 1;
            if gap >= 1 && gap <= max_gap {
                let span = (frame - prev_frame) as f64;
                for f in prev_frame + 1..*frame {
                    let t = (f - prev_frame) as f64 / span;
                    observations.push((f, interpolate_observation(prev, obs, t)));
                }
            }
        }
        observations.push((*frame, obs.clone()));
    }
    Track {
        track_id: track.track_id,
        camera_id: track.camera_id.clone(),
        observations,
    }
}

fn interpolate_observation(a: &PersonObservation, b: &PersonObservation, t: f64) -> PersonObservation {
    let keypoints = a
        .keypoints
        .iter()
        .zip(&b.keypoints)
        .map(|(ka, kb)| Keypoint::new(lerp(ka.x, kb.x, t), lerp(ka.y, kb.y, t), None))
        .collect();
    let bbox = BoundingBox {
        x1: lerp(a.bbox.x1, b.bbox.x1, t),
        y1: lerp(a.bbox.y1, b.bbox.y1, t),
        x2: lerp(a.bbox.x2, b.bbox.x2, t),
        y2: lerp(a.bbox.y2, b.bbox.y2, t),
    };
    PersonObservation {
        track_id: a.track_id,
        bbox,
        interpolated: true,
        keypoints,
        extra: Default::default(),
    }
}

/// Splits observation positions into maximal runs of consecutive frames.
fn consecutive_runs(frames: &[u64]) -> Vec<std::ops::Range<usize>> {
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=frames.len() {
        if i == frames.len() || frames[i] != frames[i - 1] + 1 {
            if i > start {
                runs.push(start..i);
            }
            start = i;
        }
    }
    runs
}

/// Centered moving average of keypoint coordinates over `window`
/// observations. Near the ends of a run the window shrinks symmetrically.
/// Smoothing never crosses an unfilled gap.
pub fn smooth_track(track: &Track, window: usize) -> Result<Track> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "smoothing window must be odd and positive, got {window}"
        )));
    }
    let half = window / 2;
    let frames: Vec<u64> = track.frame_indices().collect();
    let mut out = track.clone();
    for run in consecutive_runs(&frames) {
        let obs = &track.observations[run.clone()];
        let n = obs.len();
        for i in 0..n {
            let r = half.min(i).min(n - 1 - i);
            let span = &obs[i - r..=i + r];
            let count = span.len() as f64;
            let target = &mut out.observations[run.start + i].1;
            for j in 0..target.keypoints.len() {
                let (sx, sy) = span
                    .iter()
                    .fold((0.0, 0.0), |(sx, sy), (_, o)| (sx + o.keypoints[j].x, sy + o.keypoints[j].y));
                target.keypoints[j].x = sx / count;
                target.keypoints[j].y = sy / count;
            }
        }
    }
    Ok(out)
}

/// Translates keypoints so the bbox center is the origin and divides by the
/// bbox diagonal.
pub fn normalize_pose(obs: &PersonObservation) -> Result<Pose> {
    let diag = obs.bbox.width().hypot(obs.bbox.height());
    if !(diag.is_finite() && diag > 0.0) || obs.bbox.width() < 0.0 || obs.bbox.height() < 0.0 {
        return Err(Error::InvalidInput(format!(
            "degenerate bbox for track {}",
            obs.track_id
        )));
    }
    if obs.keypoints.len() != NUM_KEYPOINTS {
        return Err(Error::InvalidInput(format!(
            "track {}: keypoint count {}",
            obs.track_id,
            obs.keypoints.len()
        )));
    }
    let (cx, cy) = obs.bbox.center();
    let mut pose = [[0.0; 2]; NUM_KEYPOINTS];
    for (slot, k) in pose.iter_mut().zip(&obs.keypoints) {
        *slot = [(k.x - cx) / diag, (k.y - cy) / diag];
    }
    Ok(pose)
}

/// Number of windows a run of `n` frames yields.
pub fn window_count(n: usize, length: usize, stride: usize) -> usize {
    if n < length {
        0
    } else {
        (n - length) / stride + 1
    }
}

/// Cuts every maximal run of consecutive frames into windows of `length`
/// frames taken every `stride` frames.
pub fn window_track(track: &Track, length: usize, stride: usize) -> Result<Vec<PoseWindow>> {
    if length == 0 || stride == 0 {
        return Err(Error::InvalidInput("window length and stride must be at least 1".into()));
    }
    let frames: Vec<u64> = track.frame_indices().collect();
    let mut windows = Vec::new();
    for run in consecutive_runs(&frames) {
        let obs = &track.observations[run];
        if obs.len() < length {
            continue;
        }
        let poses = obs
            .iter()
            .map(|(_, o)| normalize_pose(o))
            .collect::<Result<Vec<_>>>()?;
        let mut start = 0;
        while start + length <= obs.len() {
            windows.push(PoseWindow {
                track_id: track.track_id,
                camera_id: track.camera_id.clone(),
                start_frame: obs[start].0,
                length,
                features: poses[start..start + length].to_vec(),
                covered_frames: obs[start..start + length].iter().map(|(f, _)| *f).collect(),
            });
            start += stride;
        }
    }
    Ok(windows)
}

/// Parameters for turning raw tracks into scorer windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowingParams {
    pub length: usize,
    pub stride: usize,
    pub max_gap: u64,
    /// `None` disables smoothing.
    pub smooth_window: Option<usize>,
}

impl Default for WindowingParams {
    fn default() -> Self {
        Self {
            length: 24,
            stride: 6,
            max_gap: DEFAULT_MAX_GAP,
            smooth_window: Some(DEFAULT_SMOOTH_WINDOW),
        }
    }
}

/// Interpolates, then smooths, then windows every track.
pub fn prepare_windows(tracks: &[Track], params: &WindowingParams) -> Result<Vec<PoseWindow>> {
    let mut out = Vec::new();
    for track in tracks {
        let mut t = interpolate_track(track, params.max_gap);
        if let Some(w) = params.smooth_window {
            t = smooth_track(&t, w)?;
        }
        out.extend(window_track(&t, params.length, params.stride)?);
    }
    Ok(out)
}
