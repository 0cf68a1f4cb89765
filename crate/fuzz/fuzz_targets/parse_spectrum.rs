//! Fuzzes the comma-separated spectrum parser: arbitrary UTF-8 must
//! produce `Ok` or a typed error, never a panic or unbounded work.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = kubomori::parse_spectrum(text);
    }
});
