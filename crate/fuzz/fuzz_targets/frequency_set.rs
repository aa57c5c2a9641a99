#![no_main]

use libfuzzer_sys::fuzz_target;
use trigsum::io::{format_frequency_set, parse_frequency_set};
use trigsum::Spectrum;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(set) = parse_frequency_set(text) {
        let v = set.as_slice();
        assert!(!v.is_empty() && v[0] >= 1);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(set.max_frequency() <= trigsum::freqset::MAX_FREQUENCY);
        let again = parse_frequency_set(&format_frequency_set(&set, &["fuzz".to_string()]));
        assert_eq!(again.unwrap(), set);
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(parse_frequency_set(&json).unwrap(), set);
    }
});
