#![no_main]

use libfuzzer_sys::fuzz_target;
use posevad::annotations::{read_frames, write_frames};
use posevad::model::CameraDataset;

fuzz_target!(|data: &[u8]| {
    let Ok(frames) = read_frames(data) else {
        return;
    };
    let mut buf = Vec::new();
    write_frames(&mut buf, &frames).expect("encode");
    assert_eq!(read_frames(&buf[..]).expect("re-decode"), frames);
    if let Some(first) = frames.first() {
        let id = first.camera_id.clone();
        let _ = CameraDataset::from_frames(id, frames);
    }
});
