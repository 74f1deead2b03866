#![no_main]
use libfuzzer_sys::fuzz_target;
use svt_core::io::{parse_polynomial, write_polynomial};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_polynomial(text) {
        let out = write_polynomial(&p);
        let again = parse_polynomial(&out).expect("written polynomial must parse");
        assert_eq!(again.degree(), p.degree());
        assert_eq!(again.coefficients(), p.coefficients());
    }
});
