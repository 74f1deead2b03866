#![no_main]
use libfuzzer_sys::fuzz_target;
use svt_core::io::{parse_vector, write_vector};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_vector(text) {
        let out = write_vector(&v);
        let again = parse_vector(&out).expect("written vector must parse");
        assert_eq!(again.len(), v.len());
        assert_eq!(write_vector(&again), out);
    }
});
