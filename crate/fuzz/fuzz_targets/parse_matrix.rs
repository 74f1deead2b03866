#![no_main]
use libfuzzer_sys::fuzz_target;
use svt_core::io::{parse_matrix, write_matrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        let out = write_matrix(&m);
        let again = parse_matrix(&out).expect("written matrix must parse");
        assert_eq!(write_matrix(&again), out);
    }
});
