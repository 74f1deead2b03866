#![no_main]
use libfuzzer_sys::fuzz_target;
use svt_core::io::{parse_circuit, write_circuit};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_circuit(text) {
        let out = write_circuit(&c);
        let again = parse_circuit(&out).expect("written circuit must parse");
        assert_eq!(again.gates.len(), c.gates.len());
        assert_eq!(write_circuit(&again), out);
    }
});
