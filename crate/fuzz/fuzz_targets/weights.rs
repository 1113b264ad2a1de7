#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_neural::{decode_weights, encode_weights};

fuzz_target!(|data: &[u8]| {
    let Ok(model) = decode_weights(data) else { return };
    let bytes = encode_weights(&model);
    assert_eq!(encode_weights(&decode_weights(&bytes).unwrap()), bytes);
});
