#![no_main]
use libfuzzer_sys::fuzz_target;
use svt_core::io::{parse_hamiltonian, write_hamiltonian};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = parse_hamiltonian(text) {
        let out = write_hamiltonian(&h);
        let again = parse_hamiltonian(&out).expect("written Hamiltonian must parse");
        assert_eq!(again.terms().len(), h.terms().len());
        assert_eq!(write_hamiltonian(&again), out);
    }
});
