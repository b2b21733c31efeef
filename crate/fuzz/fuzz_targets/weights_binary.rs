#![no_main]

use gausscq_core::artifact::{decode_weights, encode_weights};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ws) = decode_weights(data) {
        let bytes = encode_weights(&ws);
        assert_eq!(encode_weights(&decode_weights(&bytes).unwrap()), bytes);
    }
});
