#![no_main]

use gausscq_core::artifact::{decode_trace, encode_trace};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(trace) = decode_trace(data) {
        let bytes = encode_trace(&trace);
        assert_eq!(encode_trace(&decode_trace(&bytes).unwrap()), bytes);
    }
});
