#![no_main]

use libfuzzer_sys::fuzz_target;
use trigsum::io::{format_signs, parse_signs};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(eps) = parse_signs(text) {
        assert!(eps.as_slice().iter().all(|&e| e == 1 || e == -1));
        assert_eq!(parse_signs(&format_signs(&eps)).unwrap(), eps);
    }
});
