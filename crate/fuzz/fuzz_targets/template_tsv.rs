#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_core::pattern::{parse_template_tsv, write_template_tsv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(templates) = parse_template_tsv(text) else { return };
    let written = write_template_tsv(&templates);
    assert_eq!(parse_template_tsv(&written).unwrap(), templates);
});
