//! Guided Hamiltonian instances from small circuits via the clock
//! construction with pre-idling and a flag-qubit gadget.
//!
//! Qubit layout (1-based, qubit 1 most significant): input register `A`
//! (`1..=n`), ancillas `B` (`n+1..=n+p`), unary clock `C` (`M` qubits, clock
//! value `t` stored as `1^t 0^(M-t)`), and the flag qubit `D` last. Circuit
//! wire `w` is qubit `w`.

use crate::access::{exact_sampler, QueryVector, SampledVector, SparseMatrix};
use crate::hamiltonian::{embed, LocalHamiltonian, LocalTerm, MAX_DENSE_QUBITS};
use crate::oracle::exact_ground;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

const UNITARY_TOL: f64 = 1e-12;
const ZERO_EIGEN_TOL: f64 = 1e-9;

/// Gate names accepted in circuit files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    H,
    X,
    Z,
    T,
    Cnot,
    Mat2,
    Mat4,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
            GateKind::Mat2 => "MAT2",
            GateKind::Mat4 => "MAT4",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Z" => GateKind::Z,
            "T" => GateKind::T,
            "CNOT" => GateKind::Cnot,
            "MAT2" => GateKind::Mat2,
            "MAT4" => GateKind::Mat4,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Mat4 => 2,
            _ => 1,
        }
    }

    /// Fixed matrix of a named gate (`None` for the explicit-matrix kinds).
    pub fn fixed_matrix(self) -> Option<DMatrix<C64>> {
        let c = |x: f64| C64::new(x, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Some(match self {
            GateKind::H => DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]),
            GateKind::X => DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
            GateKind::Z => DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
            GateKind::T => DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), C64::from_polar(1.0, PI / 4.0)]),
            GateKind::Cnot => {
                let mut m = DMatrix::<C64>::zeros(4, 4);
                m[(0, 0)] = c(1.0);
                m[(1, 1)] = c(1.0);
                m[(2, 3)] = c(1.0);
                m[(3, 2)] = c(1.0);
                m
            }
            GateKind::Mat2 | GateKind::Mat4 => return None,
        })
    }
}

/// A 1- or 2-qubit gate. For two wires the first is the more significant
/// bit of the matrix index (the control, for CNOT).
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    pub matrix: DMatrix<C64>,
}

impl Gate {
    pub fn named(kind: GateKind, wires: Vec<usize>) -> Result<Self> {
        let matrix = kind
            .fixed_matrix()
            .ok_or_else(|| Error::InvalidInput(format!("{} needs explicit entries", kind.name())))?;
        Self::new(kind, wires, matrix)
    }

    pub fn new(kind: GateKind, wires: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        if wires.len() != kind.arity() {
            return Err(Error::InvalidInput(format!("{} takes {} wire(s)", kind.name(), kind.arity())));
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::InvalidInput("two-qubit gate needs distinct wires".into()));
        }
        let dim = 1 << wires.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Shape(format!("{} needs a {dim}x{dim} matrix", kind.name())));
        }
        let dev = (matrix.adjoint() * &matrix - DMatrix::<C64>::identity(dim, dim)).camax();
        if dev > UNITARY_TOL {
            return Err(Error::InvalidInput(format!("{} matrix deviates from unitary by {dev:e}", kind.name())));
        }
        Ok(Self { kind, wires, matrix })
    }
}

/// Circuit on `n` input wires and `p` ancillas (initialised to 0) whose
/// `output` wire is measured at the end; outcome 1 accepts.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub p: usize,
    pub gates: Vec<Gate>,
    pub output: usize,
}

impl Circuit {
    /// With the output wire defaulting to the first ancilla (or wire 1
    /// without ancillas).
    pub fn new(n: usize, p: usize, gates: Vec<Gate>, output: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("circuit needs at least one input wire".into()));
        }
        let width = n + p;
        for (g, gate) in gates.iter().enumerate() {
            if let Some(&w) = gate.wires.iter().find(|&&w| w == 0 || w > width) {
                return Err(Error::InvalidInput(format!("gate {} uses wire {w} outside 1..={width}", g + 1)));
            }
        }
        let output = output.unwrap_or(if p > 0 { n + 1 } else { 1 });
        if output == 0 || output > width {
            return Err(Error::InvalidInput(format!("output wire {output} outside 1..={width}")));
        }
        Ok(Self { n, p, gates, output })
    }

    pub fn width(&self) -> usize {
        self.n + self.p
    }

    /// Basis index of `|x>|0...0>`.
    fn initial_index(&self, x: &[bool]) -> Result<usize> {
        if x.len() != self.n {
            return Err(Error::Shape(format!("input has {} bits, circuit takes {}", x.len(), self.n)));
        }
        Ok(x.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b)) << self.p)
    }

    fn apply(&self, gate: &Gate, state: &mut DVector<C64>) {
        let full = embed(self.width(), &gate.wires, &gate.matrix);
        *state = full * &*state;
    }

    /// State after the first `steps` gates starting from `|x>|0>`.
    pub fn run(&self, x: &[bool], steps: usize) -> Result<DVector<C64>> {
        let mut state = DVector::<C64>::zeros(1 << self.width());
        state[self.initial_index(x)?] = C64::new(1.0, 0.0);
        for gate in &self.gates[..steps.min(self.gates.len())] {
            self.apply(gate, &mut state);
        }
        Ok(state)
    }

    /// Probability that the output wire reads 1 after the whole circuit.
    pub fn acceptance(&self, x: &[bool]) -> Result<f64> {
        let state = self.run(x, self.gates.len())?;
        let shift = self.width() - self.output;
        Ok(state.iter().enumerate().filter(|(i, _)| (i >> shift) & 1 == 1).map(|(_, a)| a.norm_sqr()).sum())
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn proj(bit: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(2, 2);
    m[(bit, bit)] = c(1.0);
    m
}

fn ket_bra(r: usize, col: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(2, 2);
    m[(r, col)] = c(1.0);
    m
}

fn kron_all(factors: &[DMatrix<C64>]) -> DMatrix<C64> {
    factors.iter().fold(DMatrix::from_element(1, 1, c(1.0)), |acc, f| acc.kronecker(f))
}

/// Clock length `M = m + N` and register offsets for a pre-idled circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub width: usize,
    /// Total time steps `M` (idle steps plus gates).
    pub steps: usize,
    pub idle: usize,
}

impl Layout {
    pub fn new(circuit: &Circuit, idle: usize) -> Self {
        Self { width: circuit.width(), steps: circuit.gates.len() + idle, idle }
    }

    /// Qubit holding clock bit `j` (1-based).
    pub fn clock(&self, j: usize) -> usize {
        self.width + j
    }

    pub fn flag(&self) -> usize {
        self.width + self.steps + 1
    }

    /// Qubits without the flag.
    pub fn qubits(&self) -> usize {
        self.width + self.steps
    }

    /// Index of `|s>_{AB} |t>_C` in the register without the flag.
    pub fn index(&self, s: usize, t: usize) -> usize {
        let m = self.steps;
        let clock = if t == 0 { 0 } else { ((1usize << t) - 1) << (m - t) };
        (s << m) | clock
    }
}

/// The four penalty Hamiltonians over registers `A B C`.
#[derive(Clone, Debug)]
pub struct ClockTerms {
    pub layout: Layout,
    pub input: LocalHamiltonian,
    pub propagation: LocalHamiltonian,
    pub output: LocalHamiltonian,
    pub stabilizer: LocalHamiltonian,
}

impl ClockTerms {
    /// Terms for `circuit` on input `x` preceded by `idle` identity steps.
    pub fn new(circuit: &Circuit, x: &[bool], idle: usize) -> Result<Self> {
        let layout = Layout::new(circuit, idle);
        let m = layout.steps;
        if m == 0 {
            return Err(Error::InvalidInput("construction needs at least one time step".into()));
        }
        if x.len() != circuit.n {
            return Err(Error::Shape(format!("input has {} bits, circuit takes {}", x.len(), circuit.n)));
        }
        let q = layout.qubits();
        let c1 = layout.clock(1);

        let mut input = Vec::new();
        for (i, &bit) in x.iter().enumerate() {
            let wrong = usize::from(!bit);
            input.push(LocalTerm::new(vec![i + 1, c1], proj(wrong).kronecker(&proj(0)))?);
        }
        for j in 1..=circuit.p {
            input.push(LocalTerm::new(vec![circuit.n + j, c1], proj(1).kronecker(&proj(0)))?);
        }

        let mut propagation = Vec::new();
        for t in 1..=m {
            let gate = (t > idle).then(|| &circuit.gates[t - idle - 1]);
            propagation.push(propagation_term(&layout, t, gate)?);
        }

        let out = vec![LocalTerm::new(vec![circuit.output, layout.clock(m)], proj(0).kronecker(&proj(1)))?];

        let stabilizer = (1..m)
            .map(|j| LocalTerm::new(vec![layout.clock(j), layout.clock(j + 1)], proj(0).kronecker(&proj(1))))
            .collect::<Result<Vec<_>>>()?;

        let k = 5.min(q);
        Ok(Self {
            layout,
            input: LocalHamiltonian::new(q, k, input)?,
            propagation: LocalHamiltonian::new(q, k, propagation)?,
            output: LocalHamiltonian::new(q, k, out)?,
            stabilizer: LocalHamiltonian::new(q, k, stabilizer)?,
        })
    }

    /// `H_in + H_prop + H_stab` as a dense matrix.
    pub fn penalty_dense(&self) -> Result<DMatrix<C64>> {
        Ok(self.input.dense()? + self.propagation.dense()? + self.stabilizer.dense()?)
    }

    /// `Delta (H_in + H_prop + H_stab) + H_out` as a dense matrix.
    pub fn verifier_dense(&self, penalty: f64) -> Result<DMatrix<C64>> {
        Ok(self.penalty_dense()? * c(penalty) + self.output.dense()?)
    }
}

/// `H_t`: advances the clock from `t-1` to `t` while applying the step's gate.
fn propagation_term(layout: &Layout, t: usize, gate: Option<&Gate>) -> Result<LocalTerm> {
    let m = layout.steps;
    let mut qubits = Vec::new();
    let (u, gate_dim) = match gate {
        Some(g) => {
            qubits.extend(&g.wires);
            (g.matrix.clone(), g.matrix.nrows())
        }
        None => (DMatrix::from_element(1, 1, c(1.0)), 1),
    };
    let mut before = Vec::new();
    let mut after = Vec::new();
    if t > 1 {
        qubits.push(layout.clock(t - 1));
        before.push(proj(1));
    }
    qubits.push(layout.clock(t));
    if t < m {
        qubits.push(layout.clock(t + 1));
        after.push(proj(0));
    }
    let with = |g: DMatrix<C64>, mid: DMatrix<C64>| {
        let mut f = vec![g];
        f.extend(before.iter().cloned());
        f.push(mid);
        f.extend(after.iter().cloned());
        kron_all(&f)
    };
    let id_g = DMatrix::<C64>::identity(gate_dim, gate_dim);
    let block = (with(id_g, DMatrix::identity(2, 2)) - with(u.clone(), ket_bra(1, 0)) - with(u.adjoint(), ket_bra(0, 1)))
        * c(0.5);
    LocalTerm::new(qubits, block)
}

/// Normalised history state `sum_t U_t...U_1 |x>|0> |t> / sqrt(M + 1)` over
/// registers `A B C`.
pub fn history_state(circuit: &Circuit, x: &[bool], idle: usize) -> Result<DVector<C64>> {
    let layout = Layout::new(circuit, idle);
    check_dense(layout.qubits())?;
    let m = layout.steps;
    let mut out = DVector::<C64>::zeros(1 << layout.qubits());
    let amp = c(1.0 / ((m + 1) as f64).sqrt());
    let mut state = circuit.run(x, 0)?;
    for t in 0..=m {
        if t > idle {
            circuit.apply(&circuit.gates[t - idle - 1], &mut state);
        }
        for (s, a) in state.iter().enumerate() {
            if *a != c(0.0) {
                out[layout.index(s, t)] += a * amp;
            }
        }
    }
    Ok(out)
}

fn check_dense(qubits: usize) -> Result<()> {
    if qubits > MAX_DENSE_QUBITS {
        return Err(Error::Size(format!("{qubits} qubits exceeds dense cap {MAX_DENSE_QUBITS}")));
    }
    Ok(())
}

/// `|x>|0> (uniform over clock values 1..=N) |+>` over all registers.
pub fn semiclassical_guide(circuit: &Circuit, x: &[bool], idle: usize) -> Result<SampledVector> {
    if idle == 0 || !idle.is_power_of_two() {
        return Err(Error::InvalidInput(format!("idle length {idle} must be a positive power of two")));
    }
    let layout = Layout::new(circuit, idle);
    let s = circuit.initial_index(x)?;
    let mut support = Vec::with_capacity(2 * idle);
    for t in 1..=idle {
        let base = layout.index(s, t) << 1;
        support.push(base + 1);
        support.push(base + 2);
    }
    support.sort_unstable();
    exact_sampler(QueryVector::subset_state(1 << (layout.qubits() + 1), &support)?)
}

/// Smallest nonzero eigenvalue of `H_in + H_prop + H_stab` and the lower
/// bound `pi^2 / (64 M^3)` it must respect.
pub fn gap(terms: &ClockTerms) -> Result<(f64, f64)> {
    let h = terms.penalty_dense()?;
    let g = exact_ground(&h)?;
    let value = g
        .spectrum
        .iter()
        .copied()
        .find(|&l| l > ZERO_EIGEN_TOL)
        .ok_or_else(|| Error::Inconsistency("penalty Hamiltonian has no nonzero eigenvalue".into()))?;
    let m = terms.layout.steps as f64;
    Ok((value, PI * PI / (64.0 * m * m * m)))
}

/// How the gadget Hamiltonian is scaled to unit norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Exact operator norm from the dense eigensolver.
    Exact,
    /// Sum of the term norms.
    TriangleBound,
}

#[derive(Clone, Debug)]
pub struct KitaevConfig {
    pub idle: usize,
    /// Penalty weight `Delta`; defaults to `max(1, 10 M^3 alpha' / (pi^2/64))`.
    pub penalty: Option<f64>,
    pub normalization: Normalization,
}

impl Default for KitaevConfig {
    fn default() -> Self {
        Self { idle: 1, penalty: None, normalization: Normalization::Exact }
    }
}

/// One generated instance: normalised Hamiltonian `H / normalization` and
/// the guide.
#[derive(Clone, Debug)]
pub struct KitaevInstance {
    pub input: Vec<bool>,
    pub layout: Layout,
    pub penalty: f64,
    pub alpha_prime: f64,
    pub beta_prime: f64,
    /// Acceptance probability of this input.
    pub acceptance: f64,
    pub hamiltonian: LocalHamiltonian,
    pub normalization: f64,
    pub history: DVector<C64>,
    pub guide: SampledVector,
    pub terms: ClockTerms,
}

impl KitaevInstance {
    /// Decision thresholds `(a, b) = (alpha', (alpha' + beta')/2) / normalization`.
    pub fn thresholds(&self) -> (f64, f64) {
        (self.alpha_prime / self.normalization, 0.5 * (self.alpha_prime + self.beta_prime) / self.normalization)
    }

    /// `|x>|0> (uniform clock 1..=N) |0>_D`, a ground state of the 0-block.
    pub fn zero_block_state(&self) -> Result<DVector<C64>> {
        let mut v = DVector::<C64>::zeros(1 << (self.layout.qubits() + 1));
        let s = x_index(&self.input, self.layout.width);
        let amp = c(1.0 / (self.layout.idle as f64).sqrt());
        for t in 1..=self.layout.idle {
            v[self.layout.index(s, t) << 1] = amp;
        }
        Ok(v)
    }

    /// Compact clock variant: the same operator with an `(M+1)`-level clock
    /// instead of unary qubits and no stabiliser term. Not a local
    /// Hamiltonian, so only available as a sparse matrix (scaled by the same
    /// normalisation).
    pub fn compact_sparse(&self, circuit: &Circuit) -> Result<SparseMatrix> {
        compact_gadget(circuit, &self.input, self, self.normalization)
    }
}

fn x_index(x: &[bool], width: usize) -> usize {
    x.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b)) << (width - x.len())
}

/// A matched pair of instances sharing `alpha'`, `beta'` and the
/// normalisation: `x_yes` is meant to accept, `x_no` to reject.
#[derive(Clone, Debug)]
pub struct KitaevPair {
    pub yes: KitaevInstance,
    pub no: KitaevInstance,
}

pub fn build_pair(circuit: &Circuit, x_yes: &[bool], x_no: &[bool], cfg: &KitaevConfig) -> Result<KitaevPair> {
    let layout = Layout::new(circuit, cfg.idle);
    check_dense(layout.qubits() + 1)?;
    let m = layout.steps as f64;
    let acc_yes = circuit.acceptance(x_yes)?;
    let acc_no = circuit.acceptance(x_no)?;
    let alpha_prime = (1.0 - acc_yes) / (m + 1.0);
    let penalty = match cfg.penalty {
        Some(d) if d > 0.0 => d,
        Some(d) => return Err(Error::InvalidInput(format!("penalty weight must be positive, got {d}"))),
        None => (10.0 * m.powi(3) * alpha_prime / (PI * PI / 64.0)).max(1.0),
    };
    let terms_yes = ClockTerms::new(circuit, x_yes, cfg.idle)?;
    let terms_no = ClockTerms::new(circuit, x_no, cfg.idle)?;
    let h_yes = terms_yes.verifier_dense(penalty)?;
    let h_no = terms_no.verifier_dense(penalty)?;
    let spec_yes = exact_ground(&h_yes)?.spectrum;
    let spec_no = exact_ground(&h_no)?.spectrum;
    let beta_prime = spec_no[0];
    if beta_prime <= alpha_prime {
        return Err(Error::InvalidInput(format!(
            "rejecting input's energy {beta_prime} does not exceed the accepting bound {alpha_prime}"
        )));
    }
    let zero_block = 0.5 * (alpha_prime + beta_prime);
    let gadget = |terms: &ClockTerms| -> Result<LocalHamiltonian> {
        let flag = terms.layout.flag();
        let one = proj(1);
        let mut out = Vec::new();
        for (h, w) in [(&terms.input, penalty), (&terms.propagation, penalty), (&terms.stabilizer, penalty), (&terms.output, 1.0)] {
            for t in h.terms() {
                let mut qubits = t.qubits().to_vec();
                qubits.push(flag);
                out.push(LocalTerm::new(qubits, (t.block() * c(w)).kronecker(&one))?);
            }
        }
        out.push(LocalTerm::new(vec![flag], proj(0) * c(zero_block))?);
        LocalHamiltonian::new(flag, 6.min(flag), out)
    };
    let raw_yes = gadget(&terms_yes)?;
    let raw_no = gadget(&terms_no)?;
    let normalization = match cfg.normalization {
        Normalization::Exact => {
            let top = |s: &[f64]| s.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
            top(&spec_yes).max(top(&spec_no)).max(zero_block)
        }
        Normalization::TriangleBound => raw_yes.norm_bound().max(raw_no.norm_bound()),
    };
    let make = |x: &[bool], terms: ClockTerms, raw: LocalHamiltonian, acceptance: f64| -> Result<KitaevInstance> {
        Ok(KitaevInstance {
            input: x.to_vec(),
            layout,
            penalty,
            alpha_prime,
            beta_prime,
            acceptance,
            hamiltonian: raw.scaled(1.0 / normalization),
            normalization,
            history: history_state(circuit, x, cfg.idle)?,
            guide: semiclassical_guide(circuit, x, cfg.idle)?,
            terms,
        })
    };
    Ok(KitaevPair {
        yes: make(x_yes, terms_yes, raw_yes, acc_yes)?,
        no: make(x_no, terms_no, raw_no, acc_no)?,
    })
}

/// Gadget operator with an `(M+1)`-level clock, divided by `normalization`.
fn compact_gadget(circuit: &Circuit, x: &[bool], inst: &KitaevInstance, normalization: f64) -> Result<SparseMatrix> {
    let layout = inst.layout;
    let m = layout.steps;
    let w = circuit.width();
    let sdim = 1usize << w;
    let levels = m + 1;
    let dim = sdim * levels * 2;
    let idx = |s: usize, t: usize, d: usize| ((s * levels + t) << 1) | d;
    let mut entries: std::collections::BTreeMap<(usize, usize), C64> = Default::default();
    let mut add = |r: usize, col: usize, v: C64| *entries.entry((r, col)).or_insert(c(0.0)) += v;
    let x0 = circuit.initial_index(x)?;
    for s in 0..sdim {
        for t in 0..levels {
            add(idx(s, t, 0), idx(s, t, 0), c(0.5 * (inst.alpha_prime + inst.beta_prime)));
        }
        // Input penalty: number of wrong input bits and set ancillas at t = 0.
        let wrong = (0..w).filter(|&b| ((s ^ x0) >> b) & 1 == 1).count();
        if wrong > 0 {
            add(idx(s, 0, 1), idx(s, 0, 1), c(inst.penalty * wrong as f64));
        }
        if (s >> (w - circuit.output)) & 1 == 0 {
            add(idx(s, m, 1), idx(s, m, 1), c(1.0));
        }
    }
    for t in 1..=m {
        let u = if t > layout.idle {
            let g = &circuit.gates[t - layout.idle - 1];
            embed(w, &g.wires, &g.matrix)
        } else {
            DMatrix::<C64>::identity(sdim, sdim)
        };
        for s in 0..sdim {
            add(idx(s, t, 1), idx(s, t, 1), c(0.5 * inst.penalty));
            add(idx(s, t - 1, 1), idx(s, t - 1, 1), c(0.5 * inst.penalty));
            for s2 in 0..sdim {
                let v = u[(s, s2)];
                if v != c(0.0) {
                    add(idx(s, t, 1), idx(s2, t - 1, 1), -v * (0.5 * inst.penalty));
                    add(idx(s2, t - 1, 1), idx(s, t, 1), -v.conj() * (0.5 * inst.penalty));
                }
            }
        }
    }
    let triplets = entries
        .into_iter()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|((r, col), v)| (r + 1, col + 1, v / normalization))
        .collect();
    SparseMatrix::from_triplets(dim, dim, triplets, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::VectorQuery;
    use crate::hamiltonian::ground_overlap;
    use crate::oracle::DenseSvd;

    fn single_x() -> Circuit {
        Circuit::new(1, 0, vec![Gate::named(GateKind::X, vec![1]).unwrap()], None).unwrap()
    }

    fn cnot_circuit() -> Circuit {
        let gates = vec![Gate::named(GateKind::Cnot, vec![1, 2]).unwrap()];
        Circuit::new(1, 1, gates, None).unwrap()
    }

    fn energy(h: &DMatrix<C64>, v: &DVector<C64>) -> f64 {
        v.dotc(&(h * v)).re
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::named(GateKind::Cnot, vec![1]).is_err());
        assert!(Gate::named(GateKind::Cnot, vec![2, 2]).is_err());
        let bad = DMatrix::from_element(2, 2, c(1.0));
        assert!(Gate::new(GateKind::Mat2, vec![1], bad).is_err());
        assert!(Circuit::new(1, 0, vec![Gate::named(GateKind::X, vec![2]).unwrap()], None).is_err());
    }

    #[test]
    fn acceptance_probabilities() {
        let c1 = single_x();
        assert!((c1.acceptance(&[false]).unwrap() - 1.0).abs() < 1e-12);
        assert!(c1.acceptance(&[true]).unwrap().abs() < 1e-12);
        let h = Circuit::new(1, 0, vec![Gate::named(GateKind::H, vec![1]).unwrap()], None).unwrap();
        assert!((h.acceptance(&[false]).unwrap() - 0.5).abs() < 1e-12);
        let cn = cnot_circuit();
        assert!((cn.acceptance(&[true]).unwrap() - 1.0).abs() < 1e-12);
        assert!(cn.acceptance(&[false]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn history_of_single_x_without_idling() {
        let h = history_state(&single_x(), &[false], 0).unwrap();
        // Qubits: A, C1. |0>|t=0> = index 0, |1>|t=1> = index 3.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [s, 0.0, 0.0, s];
        for k in 0..4 {
            assert!((h[k] - c(want[k])).norm() < 1e-12);
        }
    }

    #[test]
    fn idle_only_history_is_uniform_clock() {
        let circ = Circuit::new(2, 0, vec![], None).unwrap();
        let h = history_state(&circ, &[true, false], 3).unwrap();
        assert!((h.norm() - 1.0).abs() < 1e-12);
        let layout = Layout::new(&circ, 3);
        for t in 0..=3 {
            assert!((h[layout.index(0b10, t)] - c(0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn history_has_zero_penalty_energy() {
        for (circ, x) in [(single_x(), vec![false]), (cnot_circuit(), vec![true])] {
            for idle in [0, 1, 2] {
                let terms = ClockTerms::new(&circ, &x, idle).unwrap();
                let hist = history_state(&circ, &x, idle).unwrap();
                assert!(energy(&terms.penalty_dense().unwrap(), &hist).abs() < 1e-10);
                for t in [&terms.input, &terms.propagation, &terms.output, &terms.stabilizer] {
                    let spec = exact_ground(&t.dense().unwrap()).unwrap().spectrum;
                    assert!(spec[0] > -1e-10);
                }
            }
        }
    }

    #[test]
    fn single_idle_step_propagation_spectrum() {
        let circ = Circuit::new(1, 0, vec![], None).unwrap();
        let terms = ClockTerms::new(&circ, &[false], 1).unwrap();
        let spec = exact_ground(&terms.propagation.dense().unwrap()).unwrap().spectrum;
        // Two zero modes (one per input basis state) and the rest at 1 - cos(pi/2).
        assert!(spec[0].abs() < 1e-12 && spec[1].abs() < 1e-12);
        assert!(spec[2..].iter().all(|l| (l - 1.0).abs() < 1e-12));
    }

    #[test]
    fn stabilizer_vanishes_on_unary_clock() {
        let circ = Circuit::new(1, 0, vec![], None).unwrap();
        let terms = ClockTerms::new(&circ, &[false], 4).unwrap();
        let h = terms.stabilizer.dense().unwrap();
        for t in 0..=4 {
            let i = terms.layout.index(1, t);
            assert_eq!(h[(i, i)], c(0.0));
        }
        assert_eq!(h[(0b00100, 0b00100)], c(1.0));
    }

    #[test]
    fn clock_gap_small_cases() {
        let (value, bound) = gap(&ClockTerms::new(&single_x(), &[false], 1).unwrap()).unwrap();
        assert!(value >= bound && value > 0.0);
        assert!((bound - PI * PI / (64.0 * 8.0)).abs() < 1e-15);
    }

    #[test]
    fn guide_shape() {
        let circ = single_x();
        assert!(semiclassical_guide(&circ, &[false], 3).is_err());
        let g = semiclassical_guide(&circ, &[false], 1).unwrap();
        let support = (1..=g.dim()).filter(|&i| g.entry(i).unwrap() != c(0.0)).count();
        assert_eq!(support, 2);
    }

    #[test]
    fn pair_identities() {
        for (circ, yes, no) in [(single_x(), vec![false], vec![true]), (cnot_circuit(), vec![true], vec![false])] {
            for idle in [1, 2, 4] {
                let cfg = KitaevConfig { idle, ..Default::default() };
                let pair = build_pair(&circ, &yes, &no, &cfg).unwrap();
                let m = pair.yes.layout.steps as f64;
                let n = idle as f64;

                let hist1 = pair.yes.history.kronecker(&DVector::from_vec(vec![c(0.0), c(1.0)]));
                let u = DVector::from_column_slice(pair.yes.guide.base().as_slice());
                let ov = u.dotc(&hist1).norm_sqr();
                assert!((ov - n / (2.0 * (m + 1.0))).abs() < 1e-10);

                let h_no = pair.no.hamiltonian.dense().unwrap();
                let g = exact_ground(&h_no).unwrap();
                assert!((g.energy * pair.no.normalization - 0.5 * (pair.no.alpha_prime + pair.no.beta_prime)).abs() < 1e-10);
                let z = pair.no.zero_block_state().unwrap();
                let u_no = DVector::from_column_slice(pair.no.guide.base().as_slice());
                assert!((u_no.dotc(&z).norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
                let ov_no = ground_overlap(&pair.no.hamiltonian, pair.no.guide.base().as_slice()).unwrap();
                assert!((ov_no - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);

                let h_yes = pair.yes.hamiltonian.dense().unwrap();
                assert!(energy(&h_yes, &hist1) * pair.yes.normalization <= pair.yes.alpha_prime + 1e-10);
                let (a, b) = pair.yes.thresholds();
                assert!(exact_ground(&h_yes).unwrap().energy <= a + 1e-10 && a < b);

                // Block structure: no coupling between flag values.
                let flag_mask = 1usize;
                for i in 0..h_yes.nrows() {
                    for j in 0..h_yes.ncols() {
                        if (i & flag_mask) != (j & flag_mask) {
                            assert_eq!(h_yes[(i, j)], c(0.0));
                        }
                    }
                }
                assert!(DenseSvd::new(&h_yes).unwrap().singular_values[0] <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn compact_clock_matches_unary_on_legal_states() {
        let circ = cnot_circuit();
        let pair = build_pair(&circ, &[true], &[false], &KitaevConfig { idle: 2, ..Default::default() }).unwrap();
        let compact = pair.yes.compact_sparse(&circ).unwrap().to_dense();
        let full = pair.yes.hamiltonian.dense().unwrap();
        let layout = pair.yes.layout;
        let levels = layout.steps + 1;
        for s in 0..4 {
            for t in 0..levels {
                for d in 0..2 {
                    for s2 in 0..4 {
                        for t2 in 0..levels {
                            let i = (layout.index(s, t) << 1) | d;
                            let j = (layout.index(s2, t2) << 1) | d;
                            let ci = ((s * levels + t) << 1) | d;
                            let cj = ((s2 * levels + t2) << 1) | d;
                            assert!((full[(i, j)] - compact[(ci, cj)]).norm() < 1e-12, "{s} {t} {s2} {t2} {d}");
                        }
                    }
                }
            }
        }
    }
}
