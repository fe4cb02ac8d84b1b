#![no_main]

use kaczmarz::experiments::{parse_orders, CounterexampleSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(alpha_orders) = parse_orders(s) {
        let spec = CounterexampleSpec { alpha_orders, ..CounterexampleSpec::default() };
        let _ = spec.validate();
    }
});
