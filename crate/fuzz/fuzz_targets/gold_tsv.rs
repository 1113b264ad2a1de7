#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_engine::pipeline::parse_gold_tsv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_gold_tsv(text);
});
