#![no_main]

use kaczmarz::experiments::{Column, ColumnKind, ExperimentReport};
use libfuzzer_sys::fuzz_target;

fn columns() -> Vec<Column> {
    vec![
        Column::new("label", ColumnKind::Label),
        Column::new("n", ColumnKind::Int),
        Column::new("exact", ColumnKind::Exact),
        Column::new("x", ColumnKind::Float),
        Column::new("ok", ColumnKind::Bool),
    ]
}

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = ExperimentReport::read_csv("fuzz", columns(), data) {
        let csv = report.to_csv_string().unwrap();
        let back = ExperimentReport::read_csv("fuzz", columns(), csv.as_bytes()).unwrap();
        assert_eq!(back.rows, report.rows);
    }
});
