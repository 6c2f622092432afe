#![no_main]

use libfuzzer_sys::fuzz_target;
use wildgram::parse::{infer_alphabet, parse_pattern, parse_text, render};

// The byte syntax must never panic, and anything it accepts must satisfy
// the pattern invariants and survive a render round-trip.
fuzz_target!(|data: &[u8]| {
    let Ok(alphabet) = infer_alphabet(&[data]) else {
        return;
    };
    let _ = parse_text(data, &alphabet);
    if let Ok(pattern) = parse_pattern(data, &alphabet) {
        assert_eq!(pattern.len(), data.len());
        let mask = pattern.wildcard_mask();
        assert_eq!(
            pattern.wildcard_count(),
            mask.iter().filter(|&&w| w).count()
        );
        assert_eq!(render(pattern.symbols(), &alphabet).as_deref(), Some(data));
    }
});
