#![no_main]

use gausscq_bem2d::cache::{decode_matrices, encode_matrices};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = decode_matrices(data) {
        let bytes = encode_matrices(&m);
        assert_eq!(encode_matrices(&decode_matrices(&bytes).unwrap()), bytes);
    }
});
