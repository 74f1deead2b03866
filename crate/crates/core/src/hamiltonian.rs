//! Local Hamiltonians on qubits, their sparse assembly, and the guided
//! ground-energy decision and estimation procedures.
//!
//! Basis states are bit strings with qubit 1 as the most significant bit, so
//! basis index `x` (0-based) has qubit `q` equal to bit `n - q` of `x`.

use crate::access::{SparseMatrix, SparseQuery, VectorSample};
use crate::oracle::{check_hermitian, exact_ground};
use crate::polynomial::{build_threshold, EvenPolynomial};
use crate::sve::{decide_with_polynomial, SveDecision, SveOutcome, SveProblem};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;

/// Largest qubit count whose `2^n`-dimensional sparse matrix is assembled.
pub const MAX_QUBITS: usize = 20;
/// Largest locality; blocks are dense `2^k x 2^k` arrays.
pub const MAX_LOCALITY: usize = 10;
/// Largest qubit count handled by the dense eigensolver.
pub const MAX_DENSE_QUBITS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

/// A Hermitian block acting on an ordered list of qubits (1-based). The
/// first listed qubit is the most significant bit of the block's index.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    qubits: Vec<usize>,
    block: DMatrix<C64>,
}

impl LocalTerm {
    pub fn new(qubits: Vec<usize>, block: DMatrix<C64>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::InvalidInput("a term must act on at least one qubit".into()));
        }
        if qubits.len() > MAX_LOCALITY {
            return Err(Error::Size(format!("term acts on {} qubits, cap is {MAX_LOCALITY}", qubits.len())));
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted[0] == 0 {
            return Err(Error::InvalidInput(format!("term qubits {qubits:?} must be distinct and 1-based")));
        }
        let dim = 1usize << qubits.len();
        if block.nrows() != dim || block.ncols() != dim {
            return Err(Error::Shape(format!(
                "term on {} qubits needs a {dim}x{dim} block, got {}x{}",
                qubits.len(),
                block.nrows(),
                block.ncols()
            )));
        }
        let dev = (&block - block.adjoint()).camax();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidInput(format!("term block deviates from Hermitian by {dev:e}")));
        }
        Ok(Self { qubits, block })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn block(&self) -> &DMatrix<C64> {
        &self.block
    }
}

/// `sum_i H_i` on `n` qubits with every term acting on at most `k` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalHamiltonian {
    n: usize,
    k: usize,
    terms: Vec<LocalTerm>,
}

impl LocalHamiltonian {
    pub fn new(n: usize, k: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("qubit count must be positive".into()));
        }
        if k > MAX_LOCALITY {
            return Err(Error::Size(format!("locality {k} exceeds cap {MAX_LOCALITY}")));
        }
        for (t, term) in terms.iter().enumerate() {
            if term.qubits.len() > k {
                return Err(Error::InvalidInput(format!(
                    "term {} acts on {} qubits, locality is {k}",
                    t + 1,
                    term.qubits.len()
                )));
            }
            if let Some(&q) = term.qubits.iter().find(|&&q| q > n) {
                return Err(Error::Range { index: q, len: n });
            }
        }
        Ok(Self { n, k, terms })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn locality(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Declared sparsity `m 2^k` (plus one with the shift), at least 1.
    pub fn sparsity_bound(&self, shifted: bool) -> usize {
        (self.terms.len() * (1 << self.k) + usize::from(shifted)).max(1)
    }

    fn check_assembly_size(&self) -> Result<()> {
        if self.n > MAX_QUBITS {
            return Err(Error::Size(format!("{} qubits exceeds assembly cap {MAX_QUBITS}", self.n)));
        }
        Ok(())
    }

    /// Nonzeros of row `x` (0-based) as a column-sorted map.
    fn row(&self, x: usize) -> BTreeMap<usize, C64> {
        let mut row = BTreeMap::new();
        for term in &self.terms {
            let j = term.qubits.len();
            let shifts: Vec<usize> = term.qubits.iter().map(|&q| self.n - q).collect();
            let mut mask = 0usize;
            let mut r_loc = 0usize;
            for &s in &shifts {
                mask |= 1 << s;
                r_loc = (r_loc << 1) | ((x >> s) & 1);
            }
            let base = x & !mask;
            for c_loc in 0..(1usize << j) {
                let v = term.block[(r_loc, c_loc)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut y = base;
                for (b, &s) in shifts.iter().enumerate() {
                    y |= ((c_loc >> (j - 1 - b)) & 1) << s;
                }
                *row.entry(y).or_insert(C64::new(0.0, 0.0)) += v;
            }
        }
        row
    }

    /// Dense matrix, summed term by term through Kronecker products.
    pub fn dense(&self) -> Result<DMatrix<C64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::Size(format!("{} qubits exceeds dense cap {MAX_DENSE_QUBITS}", self.n)));
        }
        let dim = self.dim();
        let mut h = DMatrix::<C64>::zeros(dim, dim);
        for term in &self.terms {
            h += embed(self.n, &term.qubits, &term.block);
        }
        Ok(h)
    }

    /// Sparse matrix of `H`, or of `(H + 3I)/4` when `shifted`, with the
    /// declared sparsity `m 2^k (+1)`. Errors when `||H|| > 1`.
    pub fn assemble_sparse(&self, shifted: bool) -> Result<SparseMatrix> {
        self.check_assembly_size()?;
        let dim = self.dim();
        let rows: Vec<BTreeMap<usize, C64>> = (0..dim).into_par_iter().map(|x| self.row(x)).collect();
        let mut triplets = Vec::new();
        let mut gershgorin = 0.0f64;
        for (x, mut row) in rows.into_iter().enumerate() {
            gershgorin = gershgorin.max(row.values().map(|v| v.norm()).sum());
            if shifted {
                *row.entry(x).or_insert(C64::new(0.0, 0.0)) += C64::new(3.0, 0.0);
            }
            for (y, v) in row {
                if v != C64::new(0.0, 0.0) {
                    let v = if shifted { v / 4.0 } else { v };
                    triplets.push((x + 1, y + 1, v));
                }
            }
        }
        if gershgorin > 1.0 + NORM_TOL {
            let norm = self.spectral_radius()?;
            if norm > 1.0 + NORM_TOL {
                return Err(Error::InvalidInput(format!("Hamiltonian norm {norm} exceeds 1")));
            }
        }
        SparseMatrix::from_triplets(dim, dim, triplets, Some(self.sparsity_bound(shifted)))
    }

    /// `max |lambda|` from the dense eigensolver (dense cap applies).
    pub fn spectral_radius(&self) -> Result<f64> {
        let h = self.dense()?;
        let g = exact_ground(&h)?;
        Ok(g.spectrum.iter().fold(0.0f64, |m, &l| m.max(l.abs())))
    }

    /// Triangle-inequality bound `sum_i ||H_i||`.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.block.clone().singular_values().max()).sum()
    }

    /// The same Hamiltonian with every block multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| LocalTerm { qubits: t.qubits.clone(), block: &t.block * C64::new(factor, 0.0) })
            .collect();
        Self { n: self.n, k: self.k, terms }
    }
}

/// `block` acting on `qubits` of an `n`-qubit register, identity elsewhere.
pub fn embed(n: usize, qubits: &[usize], block: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = 1usize << n;
    let shifts: Vec<usize> = qubits.iter().map(|&q| n - q).collect();
    let mask: usize = shifts.iter().map(|&s| 1 << s).sum();
    let local = |x: usize| shifts.iter().fold(0usize, |acc, &s| (acc << 1) | ((x >> s) & 1));
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for x in 0..dim {
        for y in 0..dim {
            if x & !mask == y & !mask {
                out[(x, y)] = block[(local(x), local(y))];
            }
        }
    }
    out
}

/// `||Pi_H u||` with `Pi_H` the projector onto eigenvalues within the
/// degeneracy tolerance of the smallest.
pub fn ground_overlap(h: &LocalHamiltonian, u: &[C64]) -> Result<f64> {
    if u.len() != h.dim() {
        return Err(Error::Shape(format!("vector has dimension {}, Hamiltonian {}", u.len(), h.dim())));
    }
    let dense = h.dense()?;
    check_hermitian(&dense)?;
    let g = exact_ground(&dense)?;
    Ok((g.projector * DVector::from_column_slice(u)).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlhDecision {
    /// `lambda_H <= a`.
    Low,
    /// `lambda_H >= b`.
    High,
}

impl fmt::Display for GlhDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GlhDecision::Low => "LOW",
            GlhDecision::High => "HIGH",
        })
    }
}

/// Interval parameters `(t1, t2, theta1, theta2)` of the singular value
/// question on `(H + 3I)/4` equivalent to deciding `lambda_H <= a` versus
/// `lambda_H >= b`.
pub fn glh_interval(a: f64, b: f64) -> Result<(f64, f64, f64, f64)> {
    if !(-1.0 <= a && a < b && b <= 1.0) {
        return Err(Error::InvalidInput(format!("need -1 <= a < b <= 1, got a={a} b={b}")));
    }
    Ok((0.5, (3.0 + a) / 4.0, 0.5, (b - a) / 4.0))
}

/// A guided instance prepared for repeated decisions: the shifted matrix is
/// assembled once.
pub struct GuidedHamiltonian<'a> {
    shifted: SparseMatrix,
    guide: &'a (dyn VectorSample + Sync),
    delta: f64,
}

#[derive(Clone, Debug)]
pub struct GlhOutcome {
    pub decision: GlhDecision,
    pub sve: SveOutcome,
}

impl<'a> GuidedHamiltonian<'a> {
    /// `delta` is the promised overlap `||Pi_H u||`.
    pub fn new(h: &LocalHamiltonian, guide: &'a (dyn VectorSample + Sync), delta: f64) -> Result<Self> {
        if guide.dim() != h.dim() {
            return Err(Error::Shape(format!("guide has dimension {}, Hamiltonian {}", guide.dim(), h.dim())));
        }
        Ok(Self { shifted: h.assemble_sparse(true)?, guide, delta })
    }

    /// From an already shifted matrix `(H + 3I)/4`.
    pub fn from_shifted(shifted: SparseMatrix, guide: &'a (dyn VectorSample + Sync), delta: f64) -> Result<Self> {
        if guide.dim() != shifted.cols() || shifted.rows() != shifted.cols() {
            return Err(Error::Shape("shifted matrix must be square and match the guide".into()));
        }
        Ok(Self { shifted, guide, delta })
    }

    pub fn shifted(&self) -> &SparseMatrix {
        &self.shifted
    }

    fn problem(&self, a: f64, b: f64) -> Result<SveProblem<'_>> {
        let (t1, t2, theta1, theta2) = glh_interval(a, b)?;
        Ok(SveProblem { a: &self.shifted, u: self.guide, t1, t2, theta1, theta2, delta: self.delta })
    }

    pub fn threshold(&self, a: f64, b: f64) -> Result<EvenPolynomial> {
        build_threshold(&self.problem(a, b)?.threshold_spec()?)
    }

    /// Decides `lambda_H <= a` (LOW) versus `lambda_H >= b` (HIGH).
    pub fn decide(&self, a: f64, b: f64, fail_prob: f64, seed: u64) -> Result<GlhOutcome> {
        let poly = self.threshold(a, b)?;
        self.decide_with(a, b, &poly, fail_prob, seed)
    }

    fn decide_with(&self, a: f64, b: f64, poly: &EvenPolynomial, fail_prob: f64, seed: u64) -> Result<GlhOutcome> {
        let sve = decide_with_polynomial(&self.problem(a, b)?, poly, fail_prob, seed)?;
        let decision = match sve.decision {
            SveDecision::HasSingularValue => GlhDecision::Low,
            SveDecision::NoSingularValue => GlhDecision::High,
        };
        Ok(GlhOutcome { decision, sve })
    }

    /// Estimates `lambda_H` to within `eps` by scanning `2r` unit-`1/r`
    /// intervals with `r = ceil(2 / eps)`, each decided at failure probability
    /// `fail_prob / (2r)`.
    pub fn estimate(&self, eps: f64, fail_prob: f64, seed: u64) -> Result<ScanResult> {
        let r = scan_resolution(eps)?;
        let per = fail_prob / (2 * r) as f64;
        scan(r, |i, a, b| {
            let poly = self.threshold(a, b)?;
            Ok(self.decide_with(a, b, &poly, per, seed.wrapping_add(i as u64))?.decision)
        })
    }
}

/// `r = ceil(2 / eps)`.
pub fn scan_resolution(eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidInput(format!("precision must lie in (0, 1], got {eps}")));
    }
    Ok((2.0 / eps - 1e-12).ceil() as usize)
}

/// Which of the three outcome patterns a scan produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanCase {
    /// Every interval answered LOW: `lambda_H` is near -1.
    AllLow,
    /// Every interval answered HIGH: `lambda_H` is near 1.
    AllHigh,
    /// Intervals up to `last_high` answered HIGH and the rest LOW.
    Transition { last_high: usize },
}

#[derive(Clone, Debug)]
pub struct ScanResult {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub case: ScanCase,
    pub r: usize,
    pub outcomes: Vec<GlhDecision>,
}

/// Bounds `(a_i, b_i) = ((i - r - 1)/r, (i - r)/r)` of scan interval `i` in `1..=2r`.
pub fn scan_bounds(i: usize, r: usize) -> (f64, f64) {
    let rf = r as f64;
    ((i as f64 - rf - 1.0) / rf, (i as f64 - rf) / rf)
}

/// Runs `decide(i, a_i, b_i)` for every scan interval (in parallel) and
/// classifies the outcomes. HIGH must form a prefix and LOW the suffix.
pub fn scan<F>(r: usize, decide: F) -> Result<ScanResult>
where
    F: Fn(usize, f64, f64) -> Result<GlhDecision> + Sync,
{
    if r == 0 {
        return Err(Error::InvalidInput("scan resolution must be positive".into()));
    }
    let outcomes = (1..=2 * r)
        .into_par_iter()
        .map(|i| {
            let (a, b) = scan_bounds(i, r);
            decide(i, a, b)
        })
        .collect::<Result<Vec<_>>>()?;
    classify_scan(outcomes, r)
}

pub fn classify_scan(outcomes: Vec<GlhDecision>, r: usize) -> Result<ScanResult> {
    if outcomes.len() != 2 * r {
        return Err(Error::InvalidInput(format!("expected {} outcomes, got {}", 2 * r, outcomes.len())));
    }
    let highs = outcomes.iter().take_while(|&&d| d == GlhDecision::High).count();
    if outcomes[highs..].contains(&GlhDecision::High) {
        return Err(Error::Inconsistency(format!(
            "scan outcomes are not a HIGH prefix followed by LOW: {}",
            outcomes.iter().map(|d| if *d == GlhDecision::High { 'H' } else { 'L' }).collect::<String>()
        )));
    }
    let rf = r as f64;
    let (case, lo, hi) = match highs {
        0 => (ScanCase::AllLow, -1.0, -1.0 + 1.0 / rf),
        h if h == 2 * r => (ScanCase::AllHigh, 1.0 - 1.0 / rf, 1.0),
        h => {
            let (a, _) = scan_bounds(h, r);
            let (_, b) = scan_bounds(h + 1, r);
            (ScanCase::Transition { last_high: h }, a.max(-1.0), b.min(1.0))
        }
    };
    Ok(ScanResult { estimate: 0.5 * (lo + hi), lo, hi, case, r, outcomes })
}
