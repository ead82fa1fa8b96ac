#![no_main]

use libfuzzer_sys::fuzz_target;
use posevad::runner::RunConfig;

fuzz_target!(|data: &str| {
    let Ok(cfg) = RunConfig::from_json(data) else {
        return;
    };
    let _ = cfg.validate();
    let text = cfg.to_json();
    let again = RunConfig::from_json(&text).expect("re-decode");
    assert_eq!(again.to_json(), text);
});
