#![no_main]

use kaczmarz::Exponent;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<Exponent>() {
        assert!(p.value() > 0.0);
        assert_eq!(p.to_string().parse::<Exponent>().unwrap(), p);
    }
});
