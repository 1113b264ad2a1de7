#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_engine::dataset::parse_pathway_tsv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_pathway_tsv(text);
});
