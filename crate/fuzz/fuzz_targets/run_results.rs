#![no_main]

use libfuzzer_sys::fuzz_target;
use posevad::runner::report::{render_csv, render_markdown};
use posevad::runner::RunResults;

fuzz_target!(|data: &str| {
    let Ok(results) = RunResults::from_json(data) else {
        return;
    };
    let _ = render_csv(&results);
    let _ = render_markdown(&results);
});
