//! Query-count sweeps for entry evaluation over sparsity `s`, half-degree `d`
//! and dimension `n`.

use crate::instances::{random_sparse, random_unit_vector};
use crate::polynomial::EvenPolynomial;
use crate::svt::SvtEvaluator;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::time::Instant;

/// Parameter grid. `s` and `d` step by one, `n` doubles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub s: Vec<usize>,
    pub d: Vec<usize>,
    pub n: Vec<usize>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self { s: vec![2, 3, 4], d: vec![1, 2, 3], n: vec![64] }
    }
}

fn parse_range(key: &str, value: &str, doubling: bool) -> Result<Vec<usize>> {
    let bad = || Error::InvalidInput(format!("bad range '{value}' for {key}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match value.split_once("..") {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let v = num(value)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    let mut out = Vec::new();
    let mut v = lo;
    while v <= hi {
        out.push(v);
        v = match if doubling { v.checked_mul(2) } else { v.checked_add(1) } {
            Some(next) => next,
            None => break,
        };
        if out.len() > 64 {
            return Err(Error::InvalidInput(format!("range for {key} has too many points")));
        }
    }
    Ok(out)
}

/// Parses `s=2..4,d=1..3,n=16..256`; omitted keys keep their defaults.
pub fn parse_sweep(text: &str) -> Result<Sweep> {
    let mut sweep = Sweep::default();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("sweep item '{part}' is not key=range")))?;
        match key.trim() {
            "s" => sweep.s = parse_range("s", value, false)?,
            "d" => sweep.d = parse_range("d", value, false)?,
            "n" => sweep.n = parse_range("n", value, true)?,
            other => return Err(Error::InvalidInput(format!("unknown sweep key '{other}'"))),
        }
    }
    Ok(sweep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub s: usize,
    pub d: usize,
    pub n: usize,
    pub entries: usize,
    /// Mean matrix queries per entry of the plain recursion.
    pub queries_plain: f64,
    /// Mean matrix queries per entry with memoisation.
    pub queries_memo: f64,
    pub micros: Option<u128>,
}

impl BenchRow {
    /// `s^{2d}`.
    pub fn bound(&self) -> f64 {
        (self.s as f64).powi(2 * self.d as i32)
    }

    pub fn ratio(&self) -> f64 {
        self.queries_plain / self.bound()
    }
}

pub const ENTRIES_PER_POINT: usize = 4;

/// Evaluates a few entries of `P(sqrt(A^†A)) u` with `P = (1 + x^2 + ... +
/// x^{2d}) / (d + 1)` for a full-pattern random `s`-sparse matrix at each
/// grid point, counting oracle calls with and without memoisation.
pub fn run_sweep(sweep: &Sweep, seed: u64, timing: bool) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &sweep.n {
        for &s in &sweep.s {
            for &d in &sweep.d {
                if s > n {
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32) ^ ((s as u64) << 16) ^ d as u64);
                let a = random_sparse(&mut rng, n, n, s, 1.0)?;
                let u = random_unit_vector(&mut rng, n)?;
                let p = EvenPolynomial::monomial(vec![1.0 / (d + 1) as f64; d + 1])?;
                let start = Instant::now();
                let (mut plain, mut memo) = (0u64, 0u64);
                for _ in 0..ENTRIES_PER_POINT {
                    let i = rng.random_range(1..=n);
                    plain += SvtEvaluator::new(false).entry(&a, &u, &p, i)?.1.matrix_queries;
                    memo += SvtEvaluator::new(true).entry(&a, &u, &p, i)?.1.matrix_queries;
                }
                rows.push(BenchRow {
                    s,
                    d,
                    n,
                    entries: ENTRIES_PER_POINT,
                    queries_plain: plain as f64 / ENTRIES_PER_POINT as f64,
                    queries_memo: memo as f64 / ENTRIES_PER_POINT as f64,
                    micros: timing.then(|| start.elapsed().as_micros()),
                });
            }
        }
    }
    Ok(rows)
}

/// Smallest `C` with `queries <= C s^{2d}` on every row.
pub fn fit_constant(rows: &[BenchRow]) -> f64 {
    rows.iter().map(BenchRow::ratio).fold(0.0, f64::max)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let timing = rows.iter().any(|r| r.micros.is_some());
    let mut out = String::from("s,d,n,entries,queries_plain,queries_memo,s_pow_2d,ratio");
    if timing {
        out.push_str(",micros");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{:.6}",
            r.s,
            r.d,
            r.n,
            r.entries,
            r.queries_plain,
            r.queries_memo,
            r.bound(),
            r.ratio()
        );
        if let Some(us) = r.micros {
            let _ = write!(out, ",{us}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "# fitted C = {:.6}", fit_constant(rows));
    out
}
