use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use svt_core::io;

fn svt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svt")).args(args).output().expect("spawn svt")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn keys(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn headline(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

#[test]
fn estimate_on_diagonal_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let v = write(dir.path(), "v", "2\n0.8 0\n0.6 0\n");
    let one = write(dir.path(), "one", "EVEN 0\n1\n");
    let square = write(dir.path(), "sq", "EVEN 2\n0\n1\n");
    let base = ["estimate", "--matrix", &fixture("diag.matrix"), "--u", &fixture("diag.u"), "--v", &v, "--eps", "0.05"];

    // P = 1 gives v^dagger u = 0.96; P = x^2 gives v^dagger A^dagger A u = 0.15.
    for (poly, want) in [(&one, 0.96), (&square, 0.15)] {
        let mut args = base.to_vec();
        args.extend(["--poly", poly.as_str()]);
        let o = svt(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let line = headline(&o);
        let (re, im) = line.split_once(' ').unwrap();
        assert!((re.parse::<f64>().unwrap() - want).abs() <= 0.05, "{line}");
        assert!(im.parse::<f64>().unwrap().abs() <= 0.05);
        let k = keys(&stdout(&o));
        for key in ["samples_per_batch", "batches", "matrix_queries", "vector_queries", "seed", "inputs_sha256"] {
            assert!(k.contains_key(key), "missing {key}");
        }
    }
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    let args = |workers: &'static str| {
        vec![
            "estimate".to_string(),
            "--matrix".into(),
            fixture("mixed.matrix"),
            "--u".into(),
            fixture("mixed.u"),
            "--v".into(),
            fixture("mixed.u"),
            "--poly".into(),
            fixture("mixed.poly"),
            "--eps".into(),
            "0.2".into(),
            "--seed".into(),
            "11".into(),
            "--workers".into(),
            workers.into(),
        ]
    };
    let run = |a: Vec<String>| Command::new(env!("CARGO_BIN_EXE_svt")).args(a).output().unwrap();
    let a = run(args("1"));
    let b = run(args("4"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let mut with_out = args("2");
    with_out.extend(["--out".into(), out.display().to_string()]);
    let c = run(with_out);
    assert_eq!(std::fs::read(&out).unwrap(), c.stdout);
    assert_eq!(c.stdout, a.stdout);

    let mut timed = args("2");
    timed.push("--timing".into());
    assert!(keys(&stdout(&run(timed))).contains_key("wall_time_ms"));
    assert!(!keys(&stdout(&a)).contains_key("wall_time_ms"));
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.matrix", "2 2 1 1\n# comment\n1 1 x 0\n");
    let o = svt(&[
        "estimate", "--matrix", &bad, "--u", &fixture("diag.u"), "--v", &fixture("diag.u"), "--poly",
        &fixture("diag.poly"), "--eps", "0.1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");

    assert_eq!(svt(&["estimate", "--bogus"]).status.code(), Some(2));
    assert_eq!(svt(&["frobnicate"]).status.code(), Some(2));

    // zeta above eps/8.
    let o = svt(&[
        "estimate", "--matrix", &fixture("diag.matrix"), "--u", &fixture("diag.u"), "--v", &fixture("diag.u"),
        "--poly", &fixture("diag.poly"), "--eps", "0.08", "--zeta", "0.02",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = svt(&["oracle-check", "--fixtures", &dir.path().join("missing").display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sve_decides_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let has = write(dir.path(), "has.matrix", "2 2 2 1\n1 1 0.9 0\n2 2 0.2 0\n");
    let none = write(dir.path(), "none.matrix", "2 2 2 1\n1 1 0.3 0\n2 2 0.2 0\n");
    let u = write(dir.path(), "u", "2\n1 0\n0 0\n");
    let w = write(dir.path(), "w", "2\n0.6 0\n0.8 0\n");
    for (m, guide, want) in [(&has, &u, "HAS_SV"), (&none, &w, "NO_SV")] {
        let o = svt(&[
            "sve", "--matrix", m, "--u", guide, "--t1", "0.8", "--t2", "0.9", "--theta1", "0.1", "--theta2", "0.1",
            "--delta", "0.9", "--seed", "5",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(headline(&o), want);
        let k = keys(&stdout(&o));
        assert!(k["degree"].parse::<usize>().unwrap() > 0);
        assert!(k.contains_key("estimate_re"));
    }
}

#[test]
fn gen_kitaev_then_glh_decide() {
    let dir = tempfile::tempdir().unwrap();
    let circ = write(dir.path(), "x.circ", "1 0 1\nX 1\n");
    let out = dir.path().join("inst");
    let o = svt(&["gen-kitaev", "--circuit", &circ, "--x-yes", "0", "--x-no", "1", "--idle", "2", "--dir", &out.display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = keys(&stdout(&o));
    let t = keys(&std::fs::read_to_string(out.join("thresholds")).unwrap());
    assert_eq!(report["a"], t["a"]);

    // Outputs load back through the module parsers.
    for name in ["yes", "no"] {
        let h = io::parse_hamiltonian(&std::fs::read_to_string(out.join(format!("{name}.ham"))).unwrap()).unwrap();
        let u = io::parse_vector(&std::fs::read_to_string(out.join(format!("{name}.u"))).unwrap()).unwrap();
        assert_eq!(u.len(), h.dim());
        assert_eq!(io::write_hamiltonian(&io::parse_hamiltonian(&io::write_hamiltonian(&h)).unwrap()), io::write_hamiltonian(&h));
    }

    for (name, want) in [("yes", "LOW"), ("no", "HIGH")] {
        let ham = out.join(format!("{name}.ham")).display().to_string();
        let u = out.join(format!("{name}.u")).display().to_string();
        let o = svt(&[
            "glh-decide", "--hamiltonian", &ham, "--u", &u, "--a", &t["a"], "--b", &t["b"], "--delta", &t["delta"],
            "--seed", "2",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(headline(&o), want);
    }
}

#[test]
fn glh_estimate_single_qubit() {
    let dir = tempfile::tempdir().unwrap();
    // H = 0.5 Z, ground state |1> at -0.5.
    let ham = write(dir.path(), "z.ham", "1 1 1\n1\n0.5 0 0 0\n0 0 -0.5 0\n");
    let u = write(dir.path(), "u", "2\n0 0\n1 0\n");
    let o = svt(&["glh-estimate", "--hamiltonian", &ham, "--u", &u, "--eps", "0.5", "--delta", "1", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let est: f64 = headline(&o).parse().unwrap();
    assert!((est + 0.5).abs() <= 0.5, "{est}");
    let k = keys(&stdout(&o));
    assert_eq!(k["resolution"], "4");
    assert_eq!(k["outcomes"].len(), 8);
}

#[test]
fn oracle_check_passes_on_fixtures() {
    let o = svt(&["oracle-check", "--fixtures", &fixture("")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(headline(&o), "PASS");
    let k = keys(&stdout(&o));
    assert_eq!(k["failed"], "0");
    assert!(k["passed"].parse::<usize>().unwrap() >= 8);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = svt(&["bench", "--sweep", "s=2..3,d=1..2,n=16..32", "--csv", &csv.display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    let k = keys(&stdout(&o));
    assert_eq!(k["points"], "8");
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("s,d,n,entries,queries_plain,queries_memo,s_pow_2d,ratio\n"));
    assert_eq!(table.lines().count(), 10);
    assert!(k["fitted_c"].parse::<f64>().unwrap() <= 8.0 / 3.0);

    assert_eq!(svt(&["bench", "--sweep", "s=4..2"]).status.code(), Some(2));
}
