#![no_main]

use kaczmarz::experiments::ExperimentReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(report) = ExperimentReport::from_json_str(s) {
        let again = report.to_json_string().unwrap();
        assert_eq!(ExperimentReport::from_json_str(&again).unwrap(), report);
    }
});
