//! Replays the checked-in fuzz corpus seeds through the parsers so the seeds
//! stay valid as the formats evolve.

use std::path::Path;
use svt_core::bench::parse_sweep;
use svt_core::io;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("seed_")))
        .map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn matrix_seeds_round_trip() {
    for (name, text) in seeds("parse_matrix") {
        let m = io::parse_matrix(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let out = io::write_matrix(&m);
        assert_eq!(io::write_matrix(&io::parse_matrix(&out).unwrap()), out, "{name}");
    }
}

#[test]
fn vector_seeds_round_trip() {
    for (name, text) in seeds("parse_vector") {
        let v = io::parse_vector(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(io::parse_vector(&io::write_vector(&v)).unwrap(), v, "{name}");
    }
}

#[test]
fn polynomial_seeds_round_trip() {
    for (name, text) in seeds("parse_polynomial") {
        let p = io::parse_polynomial(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = io::parse_polynomial(&io::write_polynomial(&p)).unwrap();
        assert_eq!(again.coefficients(), p.coefficients(), "{name}");
    }
}

#[test]
fn hamiltonian_seeds_round_trip() {
    for (name, text) in seeds("parse_hamiltonian") {
        let h = io::parse_hamiltonian(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let out = io::write_hamiltonian(&h);
        assert_eq!(io::write_hamiltonian(&io::parse_hamiltonian(&out).unwrap()), out, "{name}");
    }
}

#[test]
fn circuit_seeds_round_trip() {
    for (name, text) in seeds("parse_circuit") {
        let c = io::parse_circuit(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let out = io::write_circuit(&c);
        assert_eq!(io::write_circuit(&io::parse_circuit(&out).unwrap()), out, "{name}");
    }
}

#[test]
fn sweep_seeds_parse() {
    for (name, text) in seeds("parse_sweep") {
        parse_sweep(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
