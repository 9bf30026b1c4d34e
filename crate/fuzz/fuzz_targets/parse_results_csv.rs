#![no_main]

use cbesov::csv::{parse_results_csv, parse_table, results_table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_table(text);
    if let Ok(rows) = parse_results_csv(text) {
        let rendered = results_table(&rows).unwrap().render();
        assert_eq!(parse_results_csv(&rendered).unwrap().len(), rows.len());
    }
});
