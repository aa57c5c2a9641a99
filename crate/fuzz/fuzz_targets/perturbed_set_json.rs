#![no_main]

use libfuzzer_sys::fuzz_target;
use trigsum::{PerturbedSet, Spectrum};

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = serde_json::from_slice::<PerturbedSet>(data) {
        assert!(p.max_multiplicity() <= 2);
        assert!(p.entries().windows(2).all(|w| w[0].value < w[1].value));
        assert_eq!(p.total(), p.entries().iter().map(|e| e.multiplicity as u64).sum::<u64>());
    }
});
