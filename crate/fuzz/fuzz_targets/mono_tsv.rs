#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_engine::dataset::{parse_mono_tsv, write_mono_tsv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_mono_tsv(text) else { return };
    assert_eq!(parse_mono_tsv(&write_mono_tsv(&rows)).unwrap(), rows);
});
