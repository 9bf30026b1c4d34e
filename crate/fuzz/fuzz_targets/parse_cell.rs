#![no_main]

use cbesov::csv::{fmt_f64, parse_f64};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_f64(text) {
        let back = parse_f64(&fmt_f64(x)).unwrap();
        assert!(back.to_bits() == x.to_bits() || (x.is_nan() && back.is_nan()));
    }
});
