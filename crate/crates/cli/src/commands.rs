use crate::report::Report;
use crate::{Command, NormArg, Outcome};
use nalgebra::DVector;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use svt_core::access::{distorted_sampler, exact_sampler, QueryVector, SampledVector, SparseQuery};
use svt_core::bench::{fit_constant, parse_sweep, run_sweep, to_csv};
use svt_core::hamiltonian::{ground_overlap, GuidedHamiltonian, ScanCase};
use svt_core::io;
use svt_core::kitaev::{build_pair, gap, KitaevConfig, KitaevInstance, Normalization};
use svt_core::oracle::{dense_polynomial_apply, exact_ground, exact_svt_apply, smallest_eigenvalue_bisection, DenseSvd};
use svt_core::sve::{decide_singular_interval, SveOutcome, SveProblem};
use svt_core::svt::{estimate_bilinear, svt_entry, Estimate, EstimatorConfig};
use svt_core::{Error, Result};

const ORACLE_TOL: f64 = 1e-10;

pub fn run(command: Command, timing: bool) -> Result<(String, Outcome)> {
    match command {
        Command::Estimate { matrix, u, v, poly, eps, fail_prob, zeta, seed } => {
            let mut r = Report::new("estimate", timing);
            let a = load(&mut r, &matrix, io::parse_matrix)?;
            let u = QueryVector::new(load(&mut r, &u, io::parse_vector)?)?;
            let v = sampler(load(&mut r, &v, io::parse_vector)?, zeta, seed)?;
            let p = load(&mut r, &poly, io::parse_polynomial)?;
            let cfg = EstimatorConfig::new(eps, fail_prob, zeta, seed)?;
            let est = estimate_bilinear(&a, &u, &v, &p, &cfg)?;
            r.headline(format!("{} {}", est.value.re, est.value.im));
            put_run(&mut r, seed, eps, fail_prob, zeta);
            r.put("degree", p.degree());
            put_estimate(&mut r, &est);
            finish(r)
        }
        Command::Sve { matrix, u, t1, t2, theta1, theta2, delta, fail_prob, zeta, seed } => {
            let mut r = Report::new("sve", timing);
            let a = load(&mut r, &matrix, io::parse_matrix)?;
            let u = sampler(load(&mut r, &u, io::parse_vector)?, zeta, seed)?;
            let problem = SveProblem { a: &a, u: &u, t1, t2, theta1, theta2, delta };
            let out = decide_singular_interval(&problem, fail_prob, seed)?;
            r.headline(out.decision.to_string());
            put_run(&mut r, seed, svt_core::sve::precision(delta), fail_prob, zeta);
            put_sve(&mut r, &out);
            finish(r)
        }
        Command::GlhDecide { hamiltonian, u, a, b, delta, fail_prob, seed } => {
            let mut r = Report::new("glh-decide", timing);
            let h = load(&mut r, &hamiltonian, io::parse_hamiltonian)?;
            let guide = sampler(load(&mut r, &u, io::parse_vector)?, 0.0, seed)?;
            let g = GuidedHamiltonian::new(&h, &guide, delta)?;
            let out = g.decide(a, b, fail_prob, seed)?;
            r.headline(out.decision.to_string());
            put_run(&mut r, seed, svt_core::sve::precision(delta), fail_prob, 0.0);
            r.put("a", a);
            r.put("b", b);
            put_sve(&mut r, &out.sve);
            finish(r)
        }
        Command::GlhEstimate { hamiltonian, u, eps, delta, fail_prob, seed } => {
            let mut r = Report::new("glh-estimate", timing);
            let h = load(&mut r, &hamiltonian, io::parse_hamiltonian)?;
            let guide = sampler(load(&mut r, &u, io::parse_vector)?, 0.0, seed)?;
            let g = GuidedHamiltonian::new(&h, &guide, delta)?;
            let scan = g.estimate(eps, fail_prob, seed)?;
            r.headline(scan.estimate.to_string());
            put_run(&mut r, seed, eps, fail_prob, 0.0);
            r.put("lambda_lo", scan.lo);
            r.put("lambda_hi", scan.hi);
            r.put("resolution", scan.r);
            r.put(
                "case",
                match scan.case {
                    ScanCase::AllLow => "all_low".to_string(),
                    ScanCase::AllHigh => "all_high".to_string(),
                    ScanCase::Transition { last_high } => format!("transition_after_{last_high}"),
                },
            );
            let pattern: String = scan.outcomes.iter().map(|d| d.to_string().chars().next().unwrap_or('?')).collect();
            r.put("outcomes", pattern);
            finish(r)
        }
        Command::GenKitaev { circuit, x_yes, x_no, idle, penalty, normalization, dir } => {
            let mut r = Report::new("gen-kitaev", timing);
            let circ = load(&mut r, &circuit, io::parse_circuit)?;
            let normalization = match normalization {
                NormArg::Exact => Normalization::Exact,
                NormArg::Triangle => Normalization::TriangleBound,
            };
            let cfg = KitaevConfig { idle, penalty, normalization };
            let pair = build_pair(&circ, &bits(&x_yes)?, &bits(&x_no)?, &cfg)?;
            let (a, b) = pair.yes.thresholds();
            let ov_yes = ground_overlap(&pair.yes.hamiltonian, pair.yes.guide.base().as_slice())?;
            let ov_no = ground_overlap(&pair.no.hamiltonian, pair.no.guide.base().as_slice())?;
            // Promise shared by both instances, rounded down.
            let delta = (ov_yes.min(ov_no) * 1e6).floor() / 1e6;
            let (gap_value, gap_bound) = gap(&pair.yes.terms)?;

            std::fs::create_dir_all(&dir)?;
            write_instance(&dir, "yes", &pair.yes)?;
            write_instance(&dir, "no", &pair.no)?;
            let thresholds = format!("a={a}\nb={b}\ndelta={delta}\n");
            std::fs::write(dir.join("thresholds"), &thresholds)?;

            r.headline(format!("{a} {b} {delta}"));
            r.put("qubits", pair.yes.hamiltonian.qubits());
            r.put("locality", pair.yes.hamiltonian.locality());
            r.put("terms", pair.yes.hamiltonian.terms().len());
            r.put("steps", pair.yes.layout.steps);
            r.put("idle", idle);
            r.put("penalty", pair.yes.penalty);
            r.put("alpha_prime", pair.yes.alpha_prime);
            r.put("beta_prime", pair.yes.beta_prime);
            r.put("normalization", pair.yes.normalization);
            r.put("acceptance_yes", pair.yes.acceptance);
            r.put("acceptance_no", pair.no.acceptance);
            r.put("a", a);
            r.put("b", b);
            r.put("overlap_yes", ov_yes);
            r.put("overlap_no", ov_no);
            r.put("delta", delta);
            r.put("gap", gap_value);
            r.put("gap_bound", gap_bound);
            r.put("expected_yes", "LOW");
            r.put("expected_no", "HIGH");
            if gap_value < gap_bound {
                r.warn(format!("clock gap {gap_value} below bound {gap_bound}"));
            }
            finish(r)
        }
        Command::OracleCheck { fixtures } => oracle_check(&fixtures, timing),
        Command::Bench { sweep, seed, csv } => {
            let mut r = Report::new("bench", timing);
            let grid = parse_sweep(&sweep)?;
            let rows = run_sweep(&grid, seed, timing)?;
            let table = to_csv(&rows);
            r.put("seed", seed);
            r.put("points", rows.len());
            r.put("fitted_c", format!("{:.6}", fit_constant(&rows)));
            match csv {
                Some(path) => {
                    std::fs::write(&path, &table)?;
                    r.put("csv", path.display());
                    finish(r)
                }
                None => {
                    let (text, outcome) = finish(r)?;
                    Ok((format!("{text}\n{table}"), outcome))
                }
            }
        }
    }
}

fn finish(r: Report) -> Result<(String, Outcome)> {
    let outcome = if r.warnings.is_empty() { Outcome::Clean } else { Outcome::Warnings };
    Ok((r.render(), outcome))
}

fn load<T>(r: &mut Report, path: &Path, parse: fn(&str) -> Result<T>) -> Result<T> {
    let text = r.read_input(path)?;
    parse(&text).map_err(|e| match e {
        Error::Parse { line, msg } => Error::InvalidInput(format!("{}: line {line}: {msg}", path.display())),
        other => Error::InvalidInput(format!("{}: {other}", path.display())),
    })
}

fn sampler(v: Vec<svt_core::C64>, zeta: f64, seed: u64) -> Result<SampledVector> {
    let v = QueryVector::new(v)?;
    if zeta > 0.0 {
        distorted_sampler(v, zeta, seed)
    } else {
        exact_sampler(v)
    }
}

fn bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidInput(format!("input string '{s}' must consist of 0 and 1"))),
        })
        .collect()
}

fn put_run(r: &mut Report, seed: u64, eps: f64, fail_prob: f64, zeta: f64) {
    r.put("seed", seed);
    r.put("epsilon", eps);
    r.put("fail_prob", fail_prob);
    r.put("zeta", zeta);
}

fn put_estimate(r: &mut Report, est: &Estimate) {
    r.put("estimate_re", est.value.re);
    r.put("estimate_im", est.value.im);
    r.put("samples_per_batch", est.samples);
    r.put("batches", est.batches);
    r.put("distinct_entries", est.distinct_entries);
    r.put("matrix_queries", est.stats.matrix_queries);
    r.put("vector_queries", est.stats.vector_queries);
}

fn put_sve(r: &mut Report, out: &SveOutcome) {
    r.put("decision", out.decision);
    r.put("degree", out.degree);
    put_estimate(r, &out.estimate);
    if out.ambiguous {
        r.warn("estimate lies between the promised bounds; the overlap promise may not hold");
    }
    if out.imaginary_excess {
        r.warn("imaginary part of the estimate exceeds the precision");
    }
}

fn write_instance(dir: &Path, name: &str, inst: &KitaevInstance) -> Result<()> {
    std::fs::write(dir.join(format!("{name}.ham")), io::write_hamiltonian(&inst.hamiltonian))?;
    std::fs::write(dir.join(format!("{name}.u")), io::write_vector(inst.guide.base().as_slice()))?;
    Ok(())
}

#[derive(Default)]
struct Fixture {
    matrix: Option<PathBuf>,
    u: Option<PathBuf>,
    poly: Option<PathBuf>,
    ham: Option<PathBuf>,
}

fn oracle_check(dir: &Path, timing: bool) -> Result<(String, Outcome)> {
    let mut r = Report::new("oracle-check", timing);
    let mut fixtures: BTreeMap<String, Fixture> = BTreeMap::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let (Some(stem), Some(ext)) = (path.file_stem(), path.extension()) else { continue };
        let f = fixtures.entry(stem.to_string_lossy().into_owned()).or_default();
        match ext.to_str() {
            Some("matrix") => f.matrix = Some(path),
            Some("u") => f.u = Some(path),
            Some("poly") => f.poly = Some(path),
            Some("ham") => f.ham = Some(path),
            _ => {}
        }
    }
    let (mut passed, mut failed) = (0usize, 0usize);
    let mut record = |r: &mut Report, key: String, err: f64, tol: f64| {
        let ok = err <= tol;
        if ok {
            passed += 1;
        } else {
            failed += 1;
        }
        r.put(&key, format!("{} max_err={err:.3e} tol={tol:.1e}", if ok { "PASS" } else { "FAIL" }));
    };
    for (name, f) in &fixtures {
        if let Some(path) = &f.matrix {
            let a = load(&mut r, path, io::parse_matrix)?;
            let dense = a.to_dense();
            let svd = DenseSvd::new(&dense)?;
            let (rec, ortho) = svd.residuals(&dense);
            record(&mut r, format!("check.{name}.svd"), rec.max(ortho), ORACLE_TOL * dense.camax().max(1.0));
            if let (Some(up), Some(pp)) = (&f.u, &f.poly) {
                let u = QueryVector::new(load(&mut r, up, io::parse_vector)?)?;
                let p = load(&mut r, pp, io::parse_polynomial)?;
                let uv = DVector::from_column_slice(u.as_slice());
                let exact = exact_svt_apply(&dense, &p, &uv)?;
                let recurrence = dense_polynomial_apply(&dense, &p, &uv)?;
                let scale = exact.camax().max(1e-300);
                let mut err = 0.0f64;
                for i in 1..=a.cols() {
                    err = err.max((svt_entry(&a, &u, &p, i)? - exact[i - 1]).norm());
                }
                record(&mut r, format!("check.{name}.svt_entry"), err / scale, ORACLE_TOL);
                record(&mut r, format!("check.{name}.dense_recurrence"), (&recurrence - &exact).camax() / scale, ORACLE_TOL);
            }
        }
        if let Some(path) = &f.ham {
            let h = load(&mut r, path, io::parse_hamiltonian)?;
            let dense = h.dense()?;
            let ground = exact_ground(&dense)?;
            let bisect = smallest_eigenvalue_bisection(&dense, 1e-13)?;
            record(&mut r, format!("check.{name}.ground_energy"), (bisect - ground.energy).abs(), 1e-9);
            let sparse = h.assemble_sparse(false)?.to_dense();
            record(&mut r, format!("check.{name}.assembly"), (&sparse - &dense).camax(), 1e-12);
        }
    }
    r.put("fixtures", fixtures.len());
    r.put("passed", passed);
    r.put("failed", failed);
    r.headline(if failed == 0 { "PASS" } else { "FAIL" });
    let (text, outcome) = finish(r)?;
    Ok((text, if failed > 0 { Outcome::Inconsistent } else { outcome }))
}
