#![no_main]

use libfuzzer_sys::fuzz_target;
use posevad::annotations::{parse_frame_line, write_frames};

fuzz_target!(|data: &[u8]| {
    let Ok(line) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(frame) = parse_frame_line(line, 1) else {
        return;
    };
    let mut buf = Vec::new();
    write_frames(&mut buf, std::slice::from_ref(&frame)).expect("encode");
    let text = String::from_utf8(buf).expect("utf8");
    let again = parse_frame_line(text.trim_end(), 1).expect("re-decode");
    assert_eq!(frame, again);
});
