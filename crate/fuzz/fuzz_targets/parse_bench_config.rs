#![no_main]

use libfuzzer_sys::fuzz_target;
use wildgram::bench::{Engine, TrialConfig};

// key=value config parsing must never panic, and accepted configs must
// still pass validation or be rejected by it, never crash it.
fuzz_target!(|data: &[u8]| {
    let Ok(content) = std::str::from_utf8(data) else {
        return;
    };
    let mut cfg = TrialConfig::new(256, 8, 2, Engine::Naive);
    if cfg.apply_config(content).is_ok() {
        let _ = cfg.validate();
    }
});
