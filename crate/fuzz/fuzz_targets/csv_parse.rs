#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = asx_core::io::parse_csv(text, false);
        let _ = asx_core::io::parse_csv(text, true);
    }
});
