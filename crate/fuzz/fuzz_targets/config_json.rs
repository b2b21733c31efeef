#![no_main]

use gausscq_harness::parse_configs;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(configs) = parse_configs(text) {
        let again = parse_configs(&serde_json::to_string(&configs).unwrap()).unwrap();
        assert_eq!(again, configs);
    }
});
