//! Data model for pose-annotated camera footage.
//!
//! A camera's annotations are a sequence of [`FrameRecord`]s. Each frame
//! carries a binary label, free-standing anomaly-region boxes and the
//! tracked persons visible in it, each with 17 COCO-ordered keypoints.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Number of keypoints in the COCO17 layout.
pub const NUM_KEYPOINTS: usize = 17;

/// COCO17 keypoint names, in storage order.
pub const COCO17_NAMES: [&str; NUM_KEYPOINTS] = [
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
];

/// A single keypoint. `visibility == None` marks an interpolated point.
///
/// Serialized as `[x, y, visibility|null]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, f64, Option<f64>)", into = "(f64, f64, Option<f64>)")]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub visibility: Option<f64>,
}

impl Keypoint {
    pub fn new(x: f64, y: f64, visibility: Option<f64>) -> Self {
        Self { x, y, visibility }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if !self.x.is_finite() || !self.y.is_finite() {
            return Err("keypoint coordinates must be finite".into());
        }
        if let Some(v) = self.visibility {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("keypoint visibility {v} outside [0,1]"));
            }
        }
        Ok(())
    }
}

impl From<(f64, f64, Option<f64>)> for Keypoint {
    fn from((x, y, visibility): (f64, f64, Option<f64>)) -> Self {
        Self { x, y, visibility }
    }
}

impl From<Keypoint> for (f64, f64, Option<f64>) {
    fn from(k: Keypoint) -> Self {
        (k.x, k.y, k.visibility)
    }
}

/// Axis-aligned box in pixel coordinates, serialized as `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BoundingBox {
    /// Builds a box, rejecting degenerate, negative or non-finite corners.
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        let b = Self { x1, y1, x2, y2 };
        b.check().map_err(Error::InvalidInput)?;
        Ok(b)
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        let all = [self.x1, self.y1, self.x2, self.y2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err("bbox coordinates must be finite".into());
        }
        if all.iter().any(|&v| v < 0.0) {
            return Err("bbox coordinates must be non-negative".into());
        }
        if !(self.x1 < self.x2 && self.y1 < self.y2) {
            return Err(format!(
                "bbox [{}, {}, {}, {}] is degenerate",
                self.x1, self.y1, self.x2, self.y2
            ));
        }
        Ok(())
    }
}

impl From<[f64; 4]> for BoundingBox {
    fn from([x1, y1, x2, y2]: [f64; 4]) -> Self {
        Self { x1, y1, x2, y2 }
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x1, b.y1, b.x2, b.y2]
    }
}

/// One tracked person in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonObservation {
    pub track_id: u64,
    pub bbox: BoundingBox,
    pub interpolated: bool,
    pub keypoints: Vec<Keypoint>,
    /// Fields not understood by the harness, kept for round-tripping.
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl PersonObservation {
    pub fn new(track_id: u64, bbox: BoundingBox, keypoints: Vec<Keypoint>) -> Self {
        let interpolated = !keypoints.is_empty() && keypoints.iter().all(|k| k.visibility.is_none());
        Self {
            track_id,
            bbox,
            interpolated,
            keypoints,
            extra: Map::new(),
        }
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        if self.keypoints.len() != NUM_KEYPOINTS {
            return Err(format!(
                "track {}: keypoint count {} (expected {NUM_KEYPOINTS})",
                self.track_id,
                self.keypoints.len()
            ));
        }
        self.bbox
            .check()
            .map_err(|m| format!("track {}: {m}", self.track_id))?;
        for k in &self.keypoints {
            k.check().map_err(|m| format!("track {}: {m}", self.track_id))?;
        }
        let all_null = self.keypoints.iter().all(|k| k.visibility.is_none());
        if self.interpolated != all_null {
            return Err(format!(
                "track {}: interpolated flag must be set exactly when every visibility is null",
                self.track_id
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Normal,
    Anomalous,
}

impl Label {
    pub fn is_anomalous(self) -> bool {
        matches!(self, Label::Anomalous)
    }
}

/// Annotations for one frame of one camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub camera_id: String,
    pub frame_index: u64,
    pub label: Label,
    #[serde(default)]
    pub anomaly_regions: Vec<BoundingBox>,
    #[serde(default)]
    pub persons: Vec<PersonObservation>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl FrameRecord {
    pub fn new(camera_id: impl Into<String>, frame_index: u64, label: Label) -> Self {
        Self {
            camera_id: camera_id.into(),
            frame_index,
            label,
            anomaly_regions: Vec::new(),
            persons: Vec::new(),
            extra: Map::new(),
        }
    }

    /// Checks the per-frame invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::InvalidFrame {
            frame_index: self.frame_index,
            message,
        };
        if self.label == Label::Normal && !self.anomaly_regions.is_empty() {
            return Err(fail("normal frame carries anomaly regions".into()));
        }
        for r in &self.anomaly_regions {
            r.check().map_err(|m| fail(format!("anomaly region: {m}")))?;
        }
        for p in &self.persons {
            p.check().map_err(fail)?;
        }
        Ok(())
    }
}

/// Frames of a single camera, strictly increasing in `frame_index`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CameraDataset {
    pub camera_id: String,
    frames: Vec<FrameRecord>,
}

impl CameraDataset {
    pub fn empty(camera_id: impl Into<String>) -> Self {
        Self {
            camera_id: camera_id.into(),
            frames: Vec::new(),
        }
    }

    /// Builds a dataset from frames in any order. Frames are validated,
    /// sorted by index and checked for duplicates and camera consistency.
    pub fn from_frames(camera_id: impl Into<String>, mut frames: Vec<FrameRecord>) -> Result<Self> {
        let camera_id = camera_id.into();
        for f in &frames {
            if f.camera_id != camera_id {
                return Err(Error::InvalidFrame {
                    frame_index: f.frame_index,
                    message: format!(
                        "camera_id {:?} does not match dataset camera {:?}",
                        f.camera_id, camera_id
                    ),
                });
            }
            f.validate()?;
        }
        frames.sort_by_key(|f| f.frame_index);
        if let Some(w) = frames.windows(2).find(|w| w[0].frame_index == w[1].frame_index) {
            return Err(Error::InvalidFrame {
                frame_index: w[0].frame_index,
                message: "duplicate frame_index".into(),
            });
        }
        Ok(Self { camera_id, frames })
    }

    pub fn frames(&self) -> &[FrameRecord] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<FrameRecord> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn get(&self, frame_index: u64) -> Option<&FrameRecord> {
        self.frames
            .binary_search_by_key(&frame_index, |f| f.frame_index)
            .ok()
            .map(|i| &self.frames[i])
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let anomalous = self.frames.iter().filter(|f| f.label.is_anomalous()).count();
        (self.frames.len() - anomalous, anomalous)
    }

    /// Keeps only the frames with the given label.
    pub fn filter_label(&self, label: Label) -> Self {
        Self {
            camera_id: self.camera_id.clone(),
            frames: self.frames.iter().filter(|f| f.label == label).cloned().collect(),
        }
    }
}

/// A train/test partition of one camera.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSet {
    pub train: CameraDataset,
    pub test: CameraDataset,
}

impl SplitSet {
    /// Builds a split and checks index disjointness and camera agreement.
    pub fn new(train: CameraDataset, test: CameraDataset) -> Result<Self> {
        if train.camera_id != test.camera_id {
            return Err(Error::InvalidInput(format!(
                "train camera {:?} differs from test camera {:?}",
                train.camera_id, test.camera_id
            )));
        }
        let train_idx: BTreeSet<u64> = train.frames().iter().map(|f| f.frame_index).collect();
        if let Some(f) = test.frames().iter().find(|f| train_idx.contains(&f.frame_index)) {
            return Err(Error::InvalidFrame {
                frame_index: f.frame_index,
                message: "frame present in both train and test".into(),
            });
        }
        Ok(Self { train, test })
    }

    /// Whether the training side holds normal frames only.
    pub fn is_standard(&self) -> bool {
        self.train.frames().iter().all(|f| f.label == Label::Normal)
    }
}

/// One person's observations over time.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub track_id: u64,
    pub camera_id: String,
    pub observations: Vec<(u64, PersonObservation)>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn frame_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.observations.iter().map(|(f, _)| *f)
    }
}

/// Groups every person observation into per-track sequences, ordered by
/// track id and then frame index.
pub fn group_tracks(dataset: &CameraDataset) -> Result<Vec<Track>> {
    let mut by_id: BTreeMap<u64, Vec<(u64, PersonObservation)>> = BTreeMap::new();
    for frame in dataset.frames() {
        for p in &frame.persons {
            by_id
                .entry(p.track_id)
                .or_default()
                .push((frame.frame_index, p.clone()));
        }
    }
    by_id
        .into_iter()
        .map(|(track_id, mut observations)| {
            observations.sort_by_key(|(f, _)| *f);
            if let Some(w) = observations.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateObservation {
                    track_id,
                    frame_index: w[0].0,
                });
            }
            Ok(Track {
                track_id,
                camera_id: dataset.camera_id.clone(),
                observations,
            })
        })
        .collect()
}
