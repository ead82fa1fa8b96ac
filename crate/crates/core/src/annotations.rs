//! Newline-delimited JSON annotation files, one [`FrameRecord`] per line.
//!
//! ```text
//! {"camera_id":"C0","frame_index":12,"label":"normal","anomaly_regions":[],
//!  "persons":[{"track_id":3,"bbox":[x1,y1,x2,y2],"interpolated":false,
//!              "keypoints":[[x,y,vis|null], ...17]}]}
//! ```
//!
//! Unknown fields are kept in the records' `extra` maps and written back out.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CameraDataset, FrameRecord};

/// Decodes and validates a single annotation line.
///
/// `line_no` is 1-based and only used for error reporting.
pub fn parse_frame_line(line: &str, line_no: usize) -> Result<FrameRecord> {
    let frame: FrameRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    frame.validate()?;
    Ok(frame)
}

/// Reads every record from `reader` in file order. Blank lines are skipped.
pub fn read_frames<R: Read>(reader: R) -> Result<Vec<FrameRecord>> {
    let reader = BufReader::new(reader);
    let mut frames = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(parse_frame_line(&line, i + 1)?);
    }
    Ok(frames)
}

/// Reads records from a file in file order, without sorting.
pub fn read_frames_file(path: impl AsRef<Path>) -> Result<Vec<FrameRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_frames(file)
}

/// Loads a single-camera annotation file as a sorted [`CameraDataset`].
///
/// An empty file yields an empty dataset with an empty camera id.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<CameraDataset> {
    let frames = read_frames_file(path)?;
    let camera_id = frames.first().map(|f| f.camera_id.clone()).unwrap_or_default();
    CameraDataset::from_frames(camera_id, frames)
}

/// Loads the frames of one camera from a (possibly multi-camera) file.
pub fn load_camera(path: impl AsRef<Path>, camera_id: &str) -> Result<CameraDataset> {
    let frames = read_frames_file(path)?
        .into_iter()
        .filter(|f| f.camera_id == camera_id)
        .collect();
    CameraDataset::from_frames(camera_id, frames)
}

/// Loads a file and groups its frames per camera, ordered by camera id.
pub fn load_cameras(path: impl AsRef<Path>) -> Result<Vec<CameraDataset>> {
    let mut groups: std::collections::BTreeMap<String, Vec<FrameRecord>> = Default::default();
    for f in read_frames_file(path)? {
        groups.entry(f.camera_id.clone()).or_default().push(f);
    }
    groups
        .into_iter()
        .map(|(cam, frames)| CameraDataset::from_frames(cam, frames))
        .collect()
}

/// Writes records one per line, in the given order.
pub fn write_frames<'a, W: Write>(
    writer: W,
    frames: impl IntoIterator<Item = &'a FrameRecord>,
) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    for f in frames {
        serde_json::to_writer(&mut w, f)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_frames_file<'a>(
    path: impl AsRef<Path>,
    frames: impl IntoIterator<Item = &'a FrameRecord>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_frames(file, frames).map_err(|e| Error::io(path, e))
}

pub fn write_dataset(dataset: &CameraDataset, path: impl AsRef<Path>) -> Result<()> {
    write_frames_file(path, dataset.frames())
}
