#![no_main]

use kaczmarz::exact::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_rational(s) {
        // the canonical form reparses to the same value
        assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }
});
