#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = cbesov::config::parse_config(text) {
        // anything accepted must survive a round trip
        let again = serde_json::to_string(&cfg).unwrap();
        cbesov::config::parse_config(&again).unwrap();
    }
});
