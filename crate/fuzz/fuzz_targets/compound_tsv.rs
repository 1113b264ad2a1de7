#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_engine::dataset::{parse_compound_tsv, write_compound_tsv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_compound_tsv(text) else { return };
    assert_eq!(parse_compound_tsv(&write_compound_tsv(&rows)).unwrap(), rows);
});
