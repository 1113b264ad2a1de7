#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_core::pattern::parse_smarts;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_smarts(text, 0);
    }
});
