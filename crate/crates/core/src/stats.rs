//! Dataset characterization: occlusion (per-frame maximum IoU), crowd
//! density, pose counts and anomaly ratios.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundingBox, CameraDataset, FrameRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub camera_id: String,
    pub frame_count: usize,
    pub pose_count: usize,
    pub anomaly_frame_count: usize,
    pub anomaly_fraction: f64,
    /// persons-per-frame -> number of frames
    pub crowd_density_histogram: BTreeMap<usize, usize>,
    /// `(frame_index, max IoU)` in frame order.
    pub max_iou_samples: Vec<(u64, f64)>,
}

impl DatasetStats {
    pub fn normal_frame_count(&self) -> usize {
        self.frame_count - self.anomaly_frame_count
    }

    /// Anomalous share as a percentage, rounded for tables.
    pub fn anomaly_percentage(&self) -> f64 {
        self.anomaly_fraction * 100.0
    }

    /// Combines statistics of two disjoint frame sets of the same camera.
    pub fn merge(&self, other: &DatasetStats) -> DatasetStats {
        let mut hist = self.crowd_density_histogram.clone();
        for (k, v) in &other.crowd_density_histogram {
            *hist.entry(*k).or_default() += v;
        }
        let frame_count = self.frame_count + other.frame_count;
        let anomaly_frame_count = self.anomaly_frame_count + other.anomaly_frame_count;
        let mut samples = self.max_iou_samples.clone();
        samples.extend_from_slice(&other.max_iou_samples);
        DatasetStats {
            camera_id: self.camera_id.clone(),
            frame_count,
            pose_count: self.pose_count + other.pose_count,
            anomaly_frame_count,
            anomaly_fraction: anomaly_frame_count as f64 / frame_count as f64,
            crowd_density_histogram: hist,
            max_iou_samples: samples,
        }
    }
}

/// Intersection over union of two boxes treated as real rectangles.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let ih = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = iw * ih;
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Largest pairwise IoU between distinct persons; 0 below two persons.
pub fn frame_max_iou(frame: &FrameRecord) -> f64 {
    let boxes: Vec<&BoundingBox> = frame.persons.iter().map(|p| &p.bbox).collect();
    let mut best = 0.0f64;
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            best = best.max(iou(boxes[i], boxes[j]));
        }
    }
    best
}

/// Statistics over an arbitrary sequence of frames from one camera.
pub fn stats_for_frames<'a>(
    camera_id: &str,
    frames: impl IntoIterator<Item = &'a FrameRecord>,
) -> Result<DatasetStats> {
    let mut stats = DatasetStats {
        camera_id: camera_id.to_string(),
        frame_count: 0,
        pose_count: 0,
        anomaly_frame_count: 0,
        anomaly_fraction: 0.0,
        crowd_density_histogram: BTreeMap::new(),
        max_iou_samples: Vec::new(),
    };
    for f in frames {
        stats.frame_count += 1;
        stats.pose_count += f.persons.len();
        if f.label.is_anomalous() {
            stats.anomaly_frame_count += 1;
        }
        *stats.crowd_density_histogram.entry(f.persons.len()).or_default() += 1;
        stats.max_iou_samples.push((f.frame_index, frame_max_iou(f)));
    }
    if stats.frame_count == 0 {
        return Err(Error::InvalidInput(format!(
            "camera {camera_id:?}: no frames, anomaly fraction undefined"
        )));
    }
    stats.anomaly_fraction = stats.anomaly_frame_count as f64 / stats.frame_count as f64;
    Ok(stats)
}

pub fn compute_stats(dataset: &CameraDataset) -> Result<DatasetStats> {
    stats_for_frames(&dataset.camera_id, dataset.frames())
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// One summary row per camera.
pub fn write_stats_csv<W: Write>(writer: W, stats: &[DatasetStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record([
        "camera_id",
        "frame_count",
        "pose_count",
        "anomaly_frame_count",
        "anomaly_fraction",
        "anomaly_percentage",
        "max_iou_median",
        "crowd_density",
    ])
    .map_err(to_err)?;
    for s in stats {
        let mut ious: Vec<f64> = s.max_iou_samples.iter().map(|(_, v)| *v).collect();
        let density = s
            .crowd_density_histogram
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            s.camera_id.clone(),
            s.frame_count.to_string(),
            s.pose_count.to_string(),
            s.anomaly_frame_count.to_string(),
            format!("{:.6}", s.anomaly_fraction),
            format!("{:.2}", s.anomaly_percentage()),
            format!("{:.6}", median(&mut ious)),
            density,
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

/// Per-frame maximum IoU samples, for external plotting.
pub fn write_max_iou_csv<W: Write>(writer: W, stats: &[DatasetStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["camera_id", "frame_index", "max_iou"]).map_err(to_err)?;
    for s in stats {
        for (f, v) in &s.max_iou_samples {
            w.write_record([s.camera_id.clone(), f.to_string(), v.to_string()])
                .map_err(to_err)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}
