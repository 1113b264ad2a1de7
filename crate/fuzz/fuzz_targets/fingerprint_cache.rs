#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_core::fingerprint::FingerprintCache;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cache) = FingerprintCache::from_tsv(text, 512, 2) else { return };
    assert_eq!(FingerprintCache::from_tsv(&cache.to_tsv(), 512, 2).unwrap(), cache);
});
