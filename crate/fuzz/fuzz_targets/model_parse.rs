#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing a model file must reject bad input with an error, never panic.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = asx_core::SimplicialModel::from_json(text);
    }
});
