#![no_main]

use libfuzzer_sys::fuzz_target;
use posevad::scorer::Scorer;

fuzz_target!(|data: &[u8]| {
    let Ok(scorer) = Scorer::from_checkpoint(data) else {
        return;
    };
    let bytes = scorer.to_checkpoint().expect("encode");
    let again = Scorer::from_checkpoint(&bytes).expect("re-decode");
    assert_eq!(again.to_checkpoint().expect("encode"), bytes);
});
