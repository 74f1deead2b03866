//! Seeded random instances: sparse matrices, unit vectors, bounded even
//! polynomials, matrices with planted singular values, and guided local
//! Hamiltonians.

use crate::access::{QueryVector, SparseMatrix};
use crate::hamiltonian::{LocalHamiltonian, LocalTerm};
use crate::oracle::exact_ground;
use crate::polynomial::EvenPolynomial;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    // Box-Muller; complex standard normal.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    C64::from_polar((-2.0 * u1.ln()).sqrt() / std::f64::consts::SQRT_2, 2.0 * std::f64::consts::PI * u2)
}

/// `rows x cols` matrix whose pattern is a union of `s` random permutation
/// patterns, each entry kept with probability `fill`, scaled so `||A|| <= 1`.
pub fn random_sparse<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, s: usize, fill: f64) -> Result<SparseMatrix> {
    if s == 0 || rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("dimensions and sparsity must be positive".into()));
    }
    let n = rows.max(cols);
    let mut seen = std::collections::HashSet::new();
    let mut triplets = Vec::new();
    for _ in 0..s {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            if i < rows && j < cols && rng.random_bool(fill) && seen.insert((i, j)) {
                triplets.push((i + 1, j + 1, gaussian_pair(rng)));
            }
        }
    }
    if triplets.is_empty() {
        triplets.push((1, 1, C64::new(1.0, 0.0)));
    }
    let m = SparseMatrix::from_triplets(rows, cols, triplets, Some(s))?;
    let bound = m.norm_bound();
    m.scaled(1.0 / bound)
}

/// Unit vector with independent complex Gaussian entries.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<QueryVector> {
    let v: Vec<C64> = (0..n).map(|_| gaussian_pair(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    QueryVector::new(v.into_iter().map(|z| z / norm).collect())
}

/// Even polynomial of degree `2d` in the Chebyshev basis with random
/// coefficients of total magnitude 1, so `|P| <= 1` on `[-1, 1]`.
pub fn random_bounded_polynomial<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<EvenPolynomial> {
    let mut c: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let l1: f64 = c.iter().map(|x| x.abs()).sum();
    for x in &mut c {
        *x /= l1;
    }
    EvenPolynomial::chebyshev(c)
}

/// Haar-like random unitary by Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_pair(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    }));
    q * phases
}

/// Square matrix with prescribed singular values and a block-diagonal SVD:
/// coordinates are shuffled, then grouped into blocks of `block` indices,
/// each carrying independent random unitaries on both sides. The result is
/// `block`-sparse.
#[derive(Clone, Debug)]
pub struct PlantedMatrix {
    pub matrix: SparseMatrix,
    pub dense: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    /// Column `k` is the right singular vector of `singular_values[k]`.
    pub right: DMatrix<C64>,
}

pub fn planted_matrix<R: Rng + ?Sized>(rng: &mut R, singular_values: &[f64], block: usize) -> Result<PlantedMatrix> {
    let n = singular_values.len();
    if block == 0 || !n.is_multiple_of(block) {
        return Err(Error::InvalidInput(format!("dimension {n} must be a multiple of block size {block}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut u = DMatrix::<C64>::zeros(n, n);
    let mut v = DMatrix::<C64>::zeros(n, n);
    for b in 0..n / block {
        let idx = &perm[b * block..(b + 1) * block];
        let ub = random_unitary(rng, block);
        let vb = random_unitary(rng, block);
        for (r, &gr) in idx.iter().enumerate() {
            for (c, &gc) in idx.iter().enumerate() {
                u[(gr, gc)] = ub[(r, c)];
                v[(gr, gc)] = vb[(r, c)];
            }
        }
    }
    let sigma = DMatrix::from_diagonal(&DVector::from_iterator(n, singular_values.iter().map(|&s| C64::new(s, 0.0))));
    let mut dense = &u * sigma * v.adjoint();
    // Clear rounding residue outside the block pattern.
    let mut block_of = vec![0usize; n];
    for (k, &p) in perm.iter().enumerate() {
        block_of[p] = k / block;
    }
    for i in 0..n {
        for j in 0..n {
            if block_of[i] != block_of[j] {
                dense[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    let matrix = SparseMatrix::from_nalgebra(&dense, Some(block))?;
    Ok(PlantedMatrix { matrix, dense, singular_values: singular_values.to_vec(), right: v })
}

/// Unit vector with overlap exactly `delta` onto the span of the columns of
/// `basis` (assumed orthonormal), mixed with orthogonal noise.
pub fn vector_with_overlap<R: Rng + ?Sized>(rng: &mut R, basis: &DMatrix<C64>, delta: f64) -> Result<DVector<C64>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("overlap must lie in [0, 1], got {delta}")));
    }
    let n = basis.nrows();
    let coeffs = DVector::from_fn(basis.ncols(), |_, _| gaussian_pair(rng));
    let inside = basis * &coeffs;
    let inside = &inside / C64::new(inside.norm(), 0.0);
    let mut noise = DVector::from_fn(n, |_, _| gaussian_pair(rng));
    let proj = basis * (basis.adjoint() * &noise);
    noise -= proj;
    if noise.norm() < 1e-12 && delta < 1.0 {
        return Err(Error::InvalidInput("subspace leaves no room for noise".into()));
    }
    let noise = if noise.norm() > 0.0 { &noise / C64::new(noise.norm(), 0.0) } else { noise };
    Ok(inside * C64::new(delta, 0.0) + noise * C64::new((1.0 - delta * delta).max(0.0).sqrt(), 0.0))
}

/// Random 2-local Hamiltonian on `n` qubits with `m` terms, scaled so the
/// sum of term norms is 1.
pub fn random_two_local<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<LocalHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidInput("2-local terms need at least two qubits".into()));
    }
    let mut terms = Vec::with_capacity(m);
    for _ in 0..m {
        let mut q: Vec<usize> = (1..=n).collect();
        q.shuffle(rng);
        q.truncate(2);
        let g = DMatrix::from_fn(4, 4, |_, _| gaussian_pair(rng));
        terms.push(LocalTerm::new(q, (&g + g.adjoint()) * C64::new(0.5, 0.0))?);
    }
    let h = LocalHamiltonian::new(n, 2, terms)?;
    let bound = h.norm_bound();
    Ok(if bound > 0.0 { h.scaled(1.0 / bound) } else { h })
}

/// A Hamiltonian with a guide of exact ground-space overlap `delta` and the
/// dense ground energy.
#[derive(Clone, Debug)]
pub struct GuidedInstance {
    pub hamiltonian: LocalHamiltonian,
    pub guide: DVector<C64>,
    pub ground_energy: f64,
    pub degeneracy: usize,
}

pub fn guided_two_local<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, delta: f64) -> Result<GuidedInstance> {
    let hamiltonian = random_two_local(rng, n, m)?;
    let dense = hamiltonian.dense()?;
    let ground = exact_ground(&dense)?;
    let eig = dense.symmetric_eigen();
    let mut cols = Vec::new();
    for k in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[k] - ground.energy <= crate::oracle::DEGENERACY_TOL {
            cols.push(eig.eigenvectors.column(k).into_owned());
        }
    }
    let basis = DMatrix::from_columns(&cols);
    let guide = vector_with_overlap(rng, &basis, delta)?;
    Ok(GuidedInstance { hamiltonian, guide, ground_energy: ground.energy, degeneracy: ground.degeneracy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::SparseQuery;
    use crate::oracle::DenseSvd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sparse_instances_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_sparse(&mut rng, 32, 32, 4, 1.0).unwrap();
        assert!(a.max_row_nnz() <= 4 && a.max_col_nnz() <= 4 && a.sparsity() == 4);
        assert!(DenseSvd::new(&a.to_dense()).unwrap().singular_values[0] <= 1.0 + 1e-12);
    }

    #[test]
    fn polynomials_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_bounded_polynomial(&mut rng, 6).unwrap();
        assert!(p.sup_norm_on_grid(2001) <= 1.0 + 1e-12);
    }

    #[test]
    fn planted_singular_values_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sv: Vec<f64> = (0..16).map(|k| 0.05 * k as f64).collect();
        let p = planted_matrix(&mut rng, &sv, 4).unwrap();
        assert!(p.matrix.max_row_nnz() <= 4);
        let mut got = DenseSvd::new(&p.dense).unwrap().singular_values;
        got.reverse();
        for (g, w) in got.iter().zip(&sv) {
            assert!((g - w).abs() < 1e-12);
        }
        let ata = p.dense.adjoint() * &p.dense;
        let v5 = p.right.column(5);
        assert!((&ata * v5 - v5 * C64::new(sv[5] * sv[5], 0.0)).norm() < 1e-12);
    }

    #[test]
    fn overlap_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = guided_two_local(&mut rng, 4, 5, 0.5).unwrap();
        let ov = crate::hamiltonian::ground_overlap(&inst.hamiltonian, inst.guide.as_slice()).unwrap();
        assert!((ov - 0.5).abs() < 1e-10);
        assert!((inst.guide.norm() - 1.0).abs() < 1e-12);
    }
}
