#![no_main]

use libfuzzer_sys::fuzz_target;
use trigsum::ExtremumCertificate;

fuzz_target!(|data: &[u8]| {
    if let Ok(c) = serde_json::from_slice::<ExtremumCertificate>(data) {
        assert!(c.tol > 0.0 && c.certified_bound >= c.value);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExtremumCertificate>(&text).unwrap(), c);
    }
});
