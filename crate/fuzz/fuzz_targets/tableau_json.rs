#![no_main]

use gausscq_core::tableau::ButcherTableau;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(t) = ButcherTableau::from_json_str(text) {
        let again = ButcherTableau::from_json_str(&t.to_json_string().unwrap()).unwrap();
        assert_eq!(again, t);
    }
});
