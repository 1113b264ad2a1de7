#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_core::molgraph::{canonicalize, parse_smiles};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mol) = parse_smiles(text) else { return };
    // canonical output must parse back to the same key
    let key = canonicalize(&mol);
    let again = parse_smiles(key.as_str()).expect("canonical SMILES re-parses");
    assert_eq!(canonicalize(&again), key);
});
