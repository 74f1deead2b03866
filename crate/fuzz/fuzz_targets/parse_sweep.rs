#![no_main]
use libfuzzer_sys::fuzz_target;
use svt_core::bench::parse_sweep;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_sweep(text) {
        for axis in [&s.s, &s.d, &s.n] {
            assert!(!axis.is_empty() && axis.len() <= 65);
            assert!(axis.windows(2).all(|w| w[0] < w[1]));
        }
    }
});
