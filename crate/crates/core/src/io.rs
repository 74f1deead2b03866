//! Line-oriented text formats for matrices, vectors, polynomials, local
//! Hamiltonians and circuits.
//!
//! Blank lines and everything after `#` on a line are ignored. Parse errors
//! carry the 1-based line number of the offending line (0 for a premature
//! end of input).
//!
//! ```text
//! # matrix: header `rows cols nnz s`, then `i j re im` in strictly ascending (i, j)
//! 2 2 2 1
//! 1 1 0.5 0
//! 2 2 0.25 0
//! ```

use crate::access::{SparseMatrix, SparseQuery};
use crate::hamiltonian::{LocalHamiltonian, LocalTerm, MAX_LOCALITY, MAX_QUBITS};
use crate::kitaev::{Circuit, Gate, GateKind};
use crate::polynomial::{Basis, EvenPolynomial};
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use std::fmt::Write as _;

/// Largest dimension accepted in matrix and vector headers.
pub const MAX_FILE_DIM: usize = 1 << 22;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate() }
    }

    /// Next non-empty line as `(line number, tokens)`.
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next().ok_or_else(|| perr(0, format!("unexpected end of input, expected {what}")))
    }

    fn finish(&mut self) -> Result<()> {
        match self.next() {
            Some((line, _)) => Err(perr(line, "unexpected trailing content")),
            None => Ok(()),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn count(tokens: &[&str], n: usize, line: usize, what: &str) -> Result<()> {
    if tokens.len() != n {
        return Err(perr(line, format!("{what}: expected {n} fields, found {}", tokens.len())));
    }
    Ok(())
}

fn uint(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| perr(line, format!("{what}: '{tok}' is not a non-negative integer")))
}

fn real(tok: &str, line: usize) -> Result<f64> {
    let x = tok.parse::<f64>().map_err(|_| perr(line, format!("'{tok}' is not a number")))?;
    if !x.is_finite() {
        return Err(perr(line, format!("'{tok}' is not finite")));
    }
    Ok(x)
}

fn complex(re: &str, im: &str, line: usize) -> Result<C64> {
    Ok(C64::new(real(re, line)?, real(im, line)?))
}

fn reline(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => perr(line, other.to_string()),
    }
}

pub fn parse_matrix(text: &str) -> Result<SparseMatrix> {
    let mut lines = Lines::new(text);
    let (hl, h) = lines.expect("matrix header")?;
    count(&h, 4, hl, "matrix header `rows cols nnz s`")?;
    let rows = uint(h[0], hl, "rows")?;
    let cols = uint(h[1], hl, "cols")?;
    let nnz = uint(h[2], hl, "nnz")?;
    let s = uint(h[3], hl, "sparsity")?;
    if rows == 0 || cols == 0 || rows > MAX_FILE_DIM || cols > MAX_FILE_DIM {
        return Err(perr(hl, format!("dimensions must lie in 1..={MAX_FILE_DIM}")));
    }
    if s == 0 {
        return Err(perr(hl, "sparsity must be positive"));
    }
    if nnz > rows.saturating_mul(s) {
        return Err(perr(hl, format!("{nnz} nonzeros cannot fit {rows} rows of sparsity {s}")));
    }
    let mut triplets = Vec::new();
    let mut prev: Option<(usize, usize)> = None;
    for _ in 0..nnz {
        let (l, t) = lines.expect("matrix entry")?;
        count(&t, 4, l, "matrix entry `i j re im`")?;
        let i = uint(t[0], l, "row")?;
        let j = uint(t[1], l, "column")?;
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(perr(l, format!("position ({i}, {j}) outside {rows}x{cols}")));
        }
        if prev.is_some_and(|p| p >= (i, j)) {
            return Err(perr(l, "entries must be in strictly ascending (row, column) order"));
        }
        prev = Some((i, j));
        let v = complex(t[2], t[3], l)?;
        if v == C64::new(0.0, 0.0) {
            return Err(perr(l, "explicit zero entry"));
        }
        triplets.push((i, j, v));
    }
    lines.finish()?;
    SparseMatrix::from_triplets(rows, cols, triplets, Some(s)).map_err(reline(hl))
}

pub fn write_matrix(m: &SparseMatrix) -> String {
    let mut out = format!("{} {} {} {}\n", m.rows(), m.cols(), m.nnz(), m.sparsity());
    for (i, j, v) in m.triplets() {
        let _ = writeln!(out, "{i} {j} {} {}", v.re, v.im);
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<C64>> {
    let mut lines = Lines::new(text);
    let (hl, h) = lines.expect("vector header")?;
    count(&h, 1, hl, "vector header `N`")?;
    let n = uint(h[0], hl, "dimension")?;
    if n == 0 || n > MAX_FILE_DIM {
        return Err(perr(hl, format!("dimension must lie in 1..={MAX_FILE_DIM}")));
    }
    let mut out = Vec::new();
    for _ in 0..n {
        let (l, t) = lines.expect("vector entry")?;
        count(&t, 2, l, "vector entry `re im`")?;
        out.push(complex(t[0], t[1], l)?);
    }
    lines.finish()?;
    Ok(out)
}

pub fn write_vector(v: &[C64]) -> String {
    let mut out = format!("{}\n", v.len());
    for z in v {
        let _ = writeln!(out, "{} {}", z.re, z.im);
    }
    out
}

/// `EVEN 2d` (monomial coefficients of `x^0, x^2, ..., x^{2d}`) or
/// `EVEN-CHEB 2d` (coefficients of `T_0, T_2, ..., T_{2d}`), one per line.
pub fn parse_polynomial(text: &str) -> Result<EvenPolynomial> {
    let mut lines = Lines::new(text);
    let (hl, h) = lines.expect("polynomial header")?;
    count(&h, 2, hl, "polynomial header `EVEN 2d`")?;
    let basis = match h[0] {
        "EVEN" => Basis::Monomial,
        "EVEN-CHEB" => Basis::Chebyshev,
        other => return Err(perr(hl, format!("unknown polynomial kind '{other}'"))),
    };
    let degree = uint(h[1], hl, "degree")?;
    if degree % 2 == 1 {
        return Err(perr(hl, format!("degree {degree} is odd")));
    }
    if degree > MAX_FILE_DIM {
        return Err(perr(hl, "degree too large"));
    }
    let mut coeffs = Vec::new();
    for _ in 0..=degree / 2 {
        let (l, t) = lines.expect("coefficient")?;
        count(&t, 1, l, "coefficient")?;
        coeffs.push(real(t[0], l)?);
    }
    lines.finish()?;
    EvenPolynomial::with_basis(basis, coeffs).map_err(reline(hl))
}

pub fn write_polynomial(p: &EvenPolynomial) -> String {
    let kind = match p.basis() {
        Basis::Monomial => "EVEN",
        Basis::Chebyshev => "EVEN-CHEB",
    };
    let mut out = format!("{kind} {}\n", p.degree());
    for c in p.coefficients() {
        let _ = writeln!(out, "{c}");
    }
    out
}

/// Header `n k m`, then per term a line of qubit indices followed by one
/// line per block row holding `2^j` pairs `re im`.
pub fn parse_hamiltonian(text: &str) -> Result<LocalHamiltonian> {
    let mut lines = Lines::new(text);
    let (hl, h) = lines.expect("Hamiltonian header")?;
    count(&h, 3, hl, "Hamiltonian header `n k m`")?;
    let n = uint(h[0], hl, "qubits")?;
    let k = uint(h[1], hl, "locality")?;
    let m = uint(h[2], hl, "terms")?;
    if n == 0 || n > MAX_QUBITS {
        return Err(perr(hl, format!("qubit count must lie in 1..={MAX_QUBITS}")));
    }
    if k > MAX_LOCALITY {
        return Err(perr(hl, format!("locality must be at most {MAX_LOCALITY}")));
    }
    let mut terms = Vec::new();
    for _ in 0..m {
        let (ql, qt) = lines.expect("term qubit line")?;
        if qt.len() > k {
            return Err(perr(ql, format!("term acts on {} qubits, locality is {k}", qt.len())));
        }
        let qubits = qt.iter().map(|t| uint(t, ql, "qubit")).collect::<Result<Vec<_>>>()?;
        if let Some(&q) = qubits.iter().find(|&&q| q == 0 || q > n) {
            return Err(perr(ql, format!("qubit {q} outside 1..={n}")));
        }
        let dim = 1usize << qubits.len();
        let mut block = DMatrix::<C64>::zeros(dim, dim);
        for r in 0..dim {
            let (l, t) = lines.expect("block row")?;
            count(&t, 2 * dim, l, "block row")?;
            for col in 0..dim {
                block[(r, col)] = complex(t[2 * col], t[2 * col + 1], l)?;
            }
        }
        terms.push(LocalTerm::new(qubits, block).map_err(reline(ql))?);
    }
    lines.finish()?;
    LocalHamiltonian::new(n, k, terms).map_err(reline(hl))
}

pub fn write_hamiltonian(h: &LocalHamiltonian) -> String {
    let mut out = format!("{} {} {}\n", h.qubits(), h.locality(), h.terms().len());
    for term in h.terms() {
        let q: Vec<String> = term.qubits().iter().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "{}", q.join(" "));
        let b = term.block();
        for r in 0..b.nrows() {
            let row: Vec<String> = (0..b.ncols()).map(|c| format!("{} {}", b[(r, c)].re, b[(r, c)].im)).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

/// Header `n p m`, an optional `OUT w` line, then `m` gate lines:
/// `H|X|Z|T w`, `CNOT control target`, `MAT2 w` + 4 pairs, `MAT4 w1 w2` + 16 pairs.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = Lines::new(text);
    let (hl, h) = lines.expect("circuit header")?;
    count(&h, 3, hl, "circuit header `n p m`")?;
    let n = uint(h[0], hl, "inputs")?;
    let p = uint(h[1], hl, "ancillas")?;
    let m = uint(h[2], hl, "gates")?;
    if n == 0 || n + p > MAX_QUBITS {
        return Err(perr(hl, format!("need 1 <= n and n + p <= {MAX_QUBITS}")));
    }
    let mut output = None;
    let mut gates = Vec::new();
    while gates.len() < m {
        let (l, t) = lines.expect("gate")?;
        if t[0] == "OUT" {
            count(&t, 2, l, "output line `OUT w`")?;
            if output.is_some() || !gates.is_empty() {
                return Err(perr(l, "OUT must appear once, before the gates"));
            }
            output = Some(uint(t[1], l, "output wire")?);
            continue;
        }
        let kind = GateKind::parse(t[0]).ok_or_else(|| perr(l, format!("unknown gate '{}'", t[0])))?;
        let arity = kind.arity();
        let gate = match kind {
            GateKind::Mat2 | GateKind::Mat4 => {
                let dim = 1usize << arity;
                count(&t, 1 + arity + 2 * dim * dim, l, kind.name())?;
                let wires = t[1..=arity].iter().map(|w| uint(w, l, "wire")).collect::<Result<Vec<_>>>()?;
                let nums = &t[1 + arity..];
                let mut mat = DMatrix::<C64>::zeros(dim, dim);
                for r in 0..dim {
                    for c in 0..dim {
                        let k = 2 * (r * dim + c);
                        mat[(r, c)] = complex(nums[k], nums[k + 1], l)?;
                    }
                }
                Gate::new(kind, wires, mat)
            }
            _ => {
                count(&t, 1 + arity, l, kind.name())?;
                let wires = t[1..].iter().map(|w| uint(w, l, "wire")).collect::<Result<Vec<_>>>()?;
                Gate::named(kind, wires)
            }
        }
        .map_err(reline(l))?;
        gates.push(gate);
    }
    if m == 0 {
        if let Some((l, t)) = lines.next() {
            if t[0] == "OUT" && t.len() == 2 {
                output = Some(uint(t[1], l, "output wire")?);
            } else {
                return Err(perr(l, "unexpected trailing content"));
            }
        }
    }
    lines.finish()?;
    Circuit::new(n, p, gates, output).map_err(reline(hl))
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("{} {} {}\nOUT {}\n", c.n, c.p, c.gates.len(), c.output);
    for g in &c.gates {
        let wires: Vec<String> = g.wires.iter().map(|w| w.to_string()).collect();
        let _ = write!(out, "{} {}", g.kind.name(), wires.join(" "));
        if matches!(g.kind, GateKind::Mat2 | GateKind::Mat4) {
            let m = &g.matrix;
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let _ = write!(out, " {} {}", m[(r, c)].re, m[(r, c)].im);
                }
            }
        }
        out.push('\n');
    }
    out
}
