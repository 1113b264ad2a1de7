#![no_main]

use libfuzzer_sys::fuzz_target;
use retrokit_core::pattern::parse_smarts_template;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(template) = parse_smarts_template(text) else { return };
    let _ = template.to_backward();
    assert_eq!(parse_smarts_template(template.smarts()).as_ref(), Ok(&template));
});
