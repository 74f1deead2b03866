//! Exact per-entry evaluation of products of sparse matrices and of
//! `P(sqrt(A^† A)) u` by local recursion over the nonzero pattern.

use crate::access::{Adjoint, SparseQuery, VectorQuery};
use crate::error::check_index;
use crate::polynomial::{Basis, EvenPolynomial};
use crate::{Error, Result, C64};
use std::collections::HashMap;

/// Counts of oracle calls made while evaluating entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Calls to the `l`-th-nonzero row/column oracles (including the final
    /// not-present answer that ends a short row).
    pub matrix_queries: u64,
    pub vector_queries: u64,
}

impl std::ops::AddAssign for QueryStats {
    fn add_assign(&mut self, rhs: Self) {
        self.matrix_queries += rhs.matrix_queries;
        self.vector_queries += rhs.vector_queries;
    }
}

/// Reads all nonzeros of row `i` through the `l`-th-entry oracle.
fn read_row(m: &dyn SparseQuery, i: usize, stats: &mut QueryStats) -> Result<Vec<(usize, C64)>> {
    let mut out = Vec::new();
    for l in 1..=m.sparsity() {
        stats.matrix_queries += 1;
        match m.row_entry(i, l)? {
            Some(e) => out.push(e),
            None => break,
        }
    }
    Ok(out)
}

fn read_col(m: &dyn SparseQuery, j: usize, stats: &mut QueryStats) -> Result<Vec<(usize, C64)>> {
    let mut out = Vec::new();
    for l in 1..=m.sparsity() {
        stats.matrix_queries += 1;
        match m.col_entry(j, l)? {
            Some(e) => out.push(e),
            None => break,
        }
    }
    Ok(out)
}

/// Evaluates entries of `B1 B2 ... Br u` by the row recursion: read the
/// nonzeros of row `i` of `B1`, recurse for each of their positions into the
/// rest of the chain, and combine.
#[derive(Debug, Default)]
pub struct ChainEvaluator {
    memoize: bool,
    stats: QueryStats,
}

impl ChainEvaluator {
    pub fn new(memoize: bool) -> Self {
        Self { memoize, stats: QueryStats::default() }
    }

    pub fn stats(&self) -> QueryStats {
        self.stats
    }

    /// Entry `i` (1-based) of `chain[0] * ... * chain[r-1] * u`.
    pub fn chain_entry(&mut self, chain: &[&dyn SparseQuery], u: &dyn VectorQuery, i: usize) -> Result<C64> {
        check_chain(chain, u)?;
        let top = chain.first().map_or(u.dim(), |m| m.rows());
        check_index(i, top)?;
        let mut memo = HashMap::new();
        self.recurse(chain, u, 0, i, &mut memo)
    }

    fn recurse(
        &mut self,
        chain: &[&dyn SparseQuery],
        u: &dyn VectorQuery,
        level: usize,
        i: usize,
        memo: &mut HashMap<(usize, usize), C64>,
    ) -> Result<C64> {
        if level == chain.len() {
            self.stats.vector_queries += 1;
            return u.entry(i);
        }
        if self.memoize {
            if let Some(&v) = memo.get(&(level, i)) {
                return Ok(v);
            }
        }
        let row = read_row(chain[level], i, &mut self.stats)?;
        let mut acc = C64::new(0.0, 0.0);
        for (j, b) in row {
            acc += b * self.recurse(chain, u, level + 1, j, memo)?;
        }
        if self.memoize {
            memo.insert((level, i), acc);
        }
        Ok(acc)
    }
}

fn check_chain(chain: &[&dyn SparseQuery], u: &dyn VectorQuery) -> Result<()> {
    for (k, w) in chain.windows(2).enumerate() {
        if w[0].cols() != w[1].rows() {
            return Err(Error::Shape(format!(
                "factor {} has {} columns but factor {} has {} rows",
                k + 1,
                w[0].cols(),
                k + 2,
                w[1].rows()
            )));
        }
    }
    if let Some(last) = chain.last() {
        if last.cols() != u.dim() {
            return Err(Error::Shape(format!("last factor has {} columns, vector has {}", last.cols(), u.dim())));
        }
    }
    Ok(())
}

/// Entry `i` of `B1 ... Br u` with memoisation on `(level, index)`.
pub fn chain_entry(chain: &[&dyn SparseQuery], u: &dyn VectorQuery, i: usize) -> Result<C64> {
    ChainEvaluator::new(true).chain_entry(chain, u, i)
}

/// Evaluator for entries of `P(sqrt(A^† A)) u`.
///
/// Monomial-basis polynomials use the expansion
/// `a_0 u + a_2 A^†A u + ... + a_{2d} (A^†A)^d u`, each power evaluated by the
/// chain recursion over `[A^†, A, ..., A^†, A]`. Chebyshev-basis polynomials
/// use the three-term recurrence `y_k = 2 B y_{k-1} - y_{k-2}` with
/// `B = 2 A^†A - I`, restricted to the indices the requested entry depends
/// on; this stays accurate at degrees where monomial coefficients do not.
#[derive(Debug)]
pub struct SvtEvaluator {
    memoize: bool,
}

impl Default for SvtEvaluator {
    fn default() -> Self {
        Self { memoize: true }
    }
}

impl SvtEvaluator {
    /// `memoize = false` re-explores shared indices (monomial route only; the
    /// Chebyshev route is always evaluated level by level).
    pub fn new(memoize: bool) -> Self {
        Self { memoize }
    }

    pub fn entry(
        &self,
        a: &dyn SparseQuery,
        u: &dyn VectorQuery,
        p: &EvenPolynomial,
        i: usize,
    ) -> Result<(C64, QueryStats)> {
        if a.cols() != u.dim() {
            return Err(Error::Shape(format!("matrix has {} columns, vector has {}", a.cols(), u.dim())));
        }
        check_index(i, u.dim())?;
        match p.basis() {
            Basis::Monomial if self.memoize => monomial_memo(a, u, p.coefficients(), i),
            Basis::Monomial => monomial_plain(a, u, p.coefficients(), i),
            Basis::Chebyshev => chebyshev_cone(a, u, p.coefficients(), i),
        }
    }
}

/// Entry `i` (1-based) of `P(sqrt(A^† A)) u`.
pub fn svt_entry(a: &dyn SparseQuery, u: &dyn VectorQuery, p: &EvenPolynomial, i: usize) -> Result<C64> {
    SvtEvaluator::default().entry(a, u, p, i).map(|(v, _)| v)
}

fn monomial_plain(a: &dyn SparseQuery, u: &dyn VectorQuery, coeffs: &[f64], i: usize) -> Result<(C64, QueryStats)> {
    let adj = Adjoint(a);
    let mut eval = ChainEvaluator::new(false);
    let mut chain: Vec<&dyn SparseQuery> = Vec::new();
    eval.stats.vector_queries += 1;
    let mut acc = u.entry(i)? * coeffs[0];
    for &c in &coeffs[1..] {
        chain.push(&adj);
        chain.push(a);
        if c != 0.0 {
            acc += eval.chain_entry(&chain, u, i)? * c;
        }
    }
    Ok((acc, eval.stats))
}

/// Memoised ladder: `level` counts factors applied on top of `u`, odd levels
/// live in the row space of `A`, even levels in its column space. Every power
/// `(A^†A)^r u` shares the lower levels, so one memo serves all of them.
struct Ladder<'a> {
    a: &'a dyn SparseQuery,
    u: &'a dyn VectorQuery,
    memo: HashMap<(usize, usize), C64>,
    stats: QueryStats,
}

impl Ladder<'_> {
    fn value(&mut self, level: usize, idx: usize) -> Result<C64> {
        if level == 0 {
            self.stats.vector_queries += 1;
            return self.u.entry(idx);
        }
        if let Some(&v) = self.memo.get(&(level, idx)) {
            return Ok(v);
        }
        let entries = if level % 2 == 1 {
            read_row(self.a, idx, &mut self.stats)?
        } else {
            read_col(self.a, idx, &mut self.stats)?.into_iter().map(|(r, v)| (r, v.conj())).collect()
        };
        let mut acc = C64::new(0.0, 0.0);
        for (k, v) in entries {
            acc += v * self.value(level - 1, k)?;
        }
        self.memo.insert((level, idx), acc);
        Ok(acc)
    }
}

fn monomial_memo(a: &dyn SparseQuery, u: &dyn VectorQuery, coeffs: &[f64], i: usize) -> Result<(C64, QueryStats)> {
    let mut ladder = Ladder { a, u, memo: HashMap::new(), stats: QueryStats::default() };
    let mut acc = ladder.value(0, i)? * coeffs[0];
    for (r, &c) in coeffs.iter().enumerate().skip(1) {
        if c != 0.0 {
            acc += ladder.value(2 * r, i)? * c;
        }
    }
    Ok((acc, ladder.stats))
}

/// Global 1-based indices mapped to dense local slots in insertion order.
#[derive(Default)]
struct IndexMap {
    local: HashMap<usize, usize>,
    global: Vec<usize>,
}

impl IndexMap {
    fn slot(&mut self, g: usize) -> usize {
        if let Some(&s) = self.local.get(&g) {
            return s;
        }
        let s = self.global.len();
        self.global.push(g);
        self.local.insert(g, s);
        s
    }

    fn len(&self) -> usize {
        self.global.len()
    }
}

// The set of column indices where y_k is needed only grows as k decreases
// (y_k[c] needs y_{k-1}[c], y_{k-2}[c] and y_{k-1} on the two-step
// neighbourhood of c), so each level's set is a prefix of the slot order.
fn chebyshev_cone(a: &dyn SparseQuery, u: &dyn VectorQuery, coeffs: &[f64], i: usize) -> Result<(C64, QueryStats)> {
    let mut stats = QueryStats::default();
    let top = coeffs.len() - 1;
    if top == 0 {
        stats.vector_queries += 1;
        return Ok((u.entry(i)? * coeffs[0], stats));
    }

    let mut cols = IndexMap::default();
    let mut rows = IndexMap::default();
    let mut col_adj: Vec<Vec<(usize, C64)>> = Vec::new(); // col slot -> (row slot, conj a)
    let mut row_adj: Vec<Vec<(usize, C64)>> = Vec::new(); // row slot -> (col slot, a)
    cols.slot(i);

    // col_count[k]: y_k needed on col slots [0, col_count[k]);
    // row_count[k]: A y_k needed on row slots [0, row_count[k]).
    let mut col_count = vec![0usize; top + 1];
    let mut row_count = vec![0usize; top];
    col_count[top] = 1;
    for k in (1..=top).rev() {
        while col_adj.len() < col_count[k] {
            let c = col_adj.len();
            let entries = read_col(a, cols.global[c], &mut stats)?;
            col_adj.push(entries.into_iter().map(|(r, v)| (rows.slot(r), v.conj())).collect());
        }
        row_count[k - 1] = rows.len();
        while row_adj.len() < row_count[k - 1] {
            let r = row_adj.len();
            let entries = read_row(a, rows.global[r], &mut stats)?;
            row_adj.push(entries.into_iter().map(|(c, v)| (cols.slot(c), v)).collect());
        }
        col_count[k - 1] = cols.len();
    }

    let zero = C64::new(0.0, 0.0);
    let n = cols.len();
    let mut y_prev2 = vec![zero; n];
    let mut y_prev = vec![zero; n];
    let mut y_cur = vec![zero; n];
    let mut ay = vec![zero; rows.len()];
    for (y, &g) in y_prev.iter_mut().zip(&cols.global[..col_count[0]]) {
        stats.vector_queries += 1;
        *y = u.entry(g)?;
    }
    let mut acc = coeffs[0] * y_prev[0];
    for k in 1..=top {
        for r in 0..row_count[k - 1] {
            ay[r] = row_adj[r].iter().map(|&(c, v)| v * y_prev[c]).sum();
        }
        for c in 0..col_count[k] {
            let ata: C64 = col_adj[c].iter().map(|&(r, v)| v * ay[r]).sum();
            let by = ata * 2.0 - y_prev[c];
            y_cur[c] = if k == 1 { by } else { by * 2.0 - y_prev2[c] };
        }
        acc += coeffs[k] * y_cur[0];
        std::mem::swap(&mut y_prev2, &mut y_prev);
        std::mem::swap(&mut y_prev, &mut y_cur);
    }
    Ok((acc, stats))
}
