#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_engine::dataset::{parse_reaction_tsv, write_reaction_tsv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rows) = parse_reaction_tsv(text) else { return };
    assert_eq!(parse_reaction_tsv(&write_reaction_tsv(&rows)).unwrap(), rows);
});
