//! Dense brute-force ground truth: SVD, exact transforms and projectors,
//! exact ground energies. Desk-scale only.

use crate::polynomial::{Basis, EvenPolynomial};
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};

/// Singular values and vectors closer than this are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;

pub const MAX_SVD_DIM: usize = 2048;
pub const MAX_EIGEN_DIM: usize = 4096;

/// Thin SVD `A = sum_i sigma_i u_i v_i^†` with singular values descending.
#[derive(Clone, Debug)]
pub struct DenseSvd {
    pub singular_values: Vec<f64>,
    /// Columns are the left singular vectors.
    pub left: DMatrix<C64>,
    /// Columns are the right singular vectors.
    pub right: DMatrix<C64>,
}

impl DenseSvd {
    pub fn new(a: &DMatrix<C64>) -> Result<Self> {
        if a.nrows().max(a.ncols()) > MAX_SVD_DIM {
            return Err(Error::Size(format!("dense SVD limited to dimension {MAX_SVD_DIM}")));
        }
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        // nalgebra's complex SVD can return orthonormal bases that do not
        // reconstruct `A` (seen on permutation-like sparse inputs), so the
        // oracle goes through faer.
        let m = faer::Mat::<C64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
        let svd = m.thin_svd().map_err(|e| Error::Construction(format!("dense SVD did not converge: {e:?}")))?;
        let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
        let singular_values = (0..s.nrows()).map(|k| s[k].re).collect();
        let left = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]);
        let right = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]);
        Ok(Self { singular_values, left, right })
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        let s = DMatrix::from_diagonal(&DVector::from_iterator(
            self.singular_values.len(),
            self.singular_values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        &self.left * s * self.right.adjoint()
    }

    /// Largest deviation of `A` from the reconstruction and of the bases from
    /// orthonormality.
    pub fn residuals(&self, a: &DMatrix<C64>) -> (f64, f64) {
        let rec = (self.reconstruct() - a).camax();
        let t = self.singular_values.len();
        let id = DMatrix::<C64>::identity(t, t);
        let ortho = (self.left.adjoint() * &self.left - &id).camax().max((self.right.adjoint() * &self.right - &id).camax());
        (rec, ortho)
    }
}

fn check_vec(a: &DMatrix<C64>, u: &DVector<C64>) -> Result<()> {
    if a.ncols() != u.len() {
        return Err(Error::Shape(format!("matrix has {} columns, vector has {}", a.ncols(), u.len())));
    }
    Ok(())
}

/// `P(sqrt(A^† A)) u` from the SVD. Right singular directions outside the
/// thin SVD (when `A` has fewer rows than columns) carry singular value 0.
pub fn exact_svt_apply(a: &DMatrix<C64>, p: &EvenPolynomial, u: &DVector<C64>) -> Result<DVector<C64>> {
    check_vec(a, u)?;
    let svd = DenseSvd::new(a)?;
    let p0 = p.eval(0.0);
    let mut out = u * C64::new(p0, 0.0);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let v = svd.right.column(k);
        let overlap = v.dotc(u);
        out += v * (overlap * (p.eval(s) - p0));
    }
    Ok(out)
}

/// `P(sqrt(A^† A)) u` by repeated dense multiplication with `A^† A`, in the
/// polynomial's own basis (power sums or the Chebyshev recurrence).
pub fn dense_polynomial_apply(a: &DMatrix<C64>, p: &EvenPolynomial, u: &DVector<C64>) -> Result<DVector<C64>> {
    check_vec(a, u)?;
    let gram = a.adjoint() * a;
    let c = p.coefficients();
    match p.basis() {
        Basis::Monomial => {
            let mut pow = u.clone();
            let mut out = u * C64::new(c[0], 0.0);
            for &ck in &c[1..] {
                pow = &gram * pow;
                out += &pow * C64::new(ck, 0.0);
            }
            Ok(out)
        }
        Basis::Chebyshev => {
            let b = |y: &DVector<C64>| &gram * y * C64::new(2.0, 0.0) - y;
            let mut prev = u.clone();
            let mut out = u * C64::new(c[0], 0.0);
            if c.len() > 1 {
                let mut cur = b(u);
                out += &cur * C64::new(c[1], 0.0);
                for &ck in &c[2..] {
                    let next = b(&cur) * C64::new(2.0, 0.0) - &prev;
                    prev = cur;
                    cur = next;
                    out += &cur * C64::new(ck, 0.0);
                }
            }
            Ok(out)
        }
    }
}

/// `v^† P(sqrt(A^† A)) u`.
pub fn exact_bilinear(a: &DMatrix<C64>, p: &EvenPolynomial, u: &DVector<C64>, v: &DVector<C64>) -> Result<C64> {
    if v.len() != u.len() {
        return Err(Error::Shape(format!("v has dimension {}, u has {}", v.len(), u.len())));
    }
    Ok(v.dotc(&exact_svt_apply(a, p, u)?))
}

/// Orthogonal projector onto the right singular vectors with singular value
/// in `[lo, hi]` (widened by the degeneracy tolerance). The null space counts
/// as singular value 0.
pub fn exact_projector(a: &DMatrix<C64>, lo: f64, hi: f64) -> Result<DMatrix<C64>> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidInput(format!("projector range [{lo}, {hi}] must satisfy 0 <= a < b")));
    }
    let n = a.ncols();
    let svd = DenseSvd::new(a)?;
    let inside = |s: f64| s >= lo - DEGENERACY_TOL && s <= hi + DEGENERACY_TOL;
    let mut proj = DMatrix::<C64>::zeros(n, n);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if inside(s) {
            let v = svd.right.column(k);
            proj += v * v.adjoint();
        }
    }
    if inside(0.0) {
        // Complement of the span of the thin right basis.
        let t = svd.singular_values.len();
        let span = &svd.right * svd.right.adjoint();
        if t < n {
            proj += DMatrix::<C64>::identity(n, n) - span;
        }
    }
    Ok(proj)
}

/// Smallest eigenvalue of a Hermitian matrix and the projector onto its
/// eigenspace (eigenvalues within the degeneracy tolerance).
#[derive(Clone, Debug)]
pub struct Ground {
    pub energy: f64,
    pub projector: DMatrix<C64>,
    pub degeneracy: usize,
    /// Full spectrum, ascending.
    pub spectrum: Vec<f64>,
}

pub fn check_hermitian(h: &DMatrix<C64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Shape(format!("{}x{} matrix is not square", h.nrows(), h.ncols())));
    }
    let dev = (h - h.adjoint()).camax();
    if dev > 1e-10 {
        return Err(Error::InvalidInput(format!("matrix deviates from Hermitian by {dev:e}")));
    }
    Ok(())
}

pub fn exact_ground(h: &DMatrix<C64>) -> Result<Ground> {
    check_hermitian(h)?;
    if h.nrows() > MAX_EIGEN_DIM {
        return Err(Error::Size(format!("dense eigensolver limited to dimension {MAX_EIGEN_DIM}")));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let spectrum: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let energy = spectrum[0];
    let n = h.nrows();
    let mut projector = DMatrix::<C64>::zeros(n, n);
    let mut degeneracy = 0;
    for &k in &order {
        if eig.eigenvalues[k] - energy <= DEGENERACY_TOL {
            let v = eig.eigenvectors.column(k);
            projector += v * v.adjoint();
            degeneracy += 1;
        }
    }
    Ok(Ground { energy, projector, degeneracy, spectrum })
}

/// Number of eigenvalues of Hermitian `h` strictly below `x`, from the signs
/// of the pivots of an unpivoted `L D L^†` factorisation of `h - x I`.
pub fn count_below(h: &DMatrix<C64>, x: f64) -> usize {
    let n = h.nrows();
    let mut m = h.clone();
    for i in 0..n {
        m[(i, i)] -= x;
    }
    let scale = h.camax().max(x.abs()).max(1.0);
    let mut negatives = 0;
    for k in 0..n {
        let mut d = m[(k, k)].re;
        if d.abs() < 1e-300 {
            d = -f64::EPSILON * scale;
        }
        if d < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let l = m[(i, k)] / d;
            if l == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= l * mkj;
            }
        }
    }
    negatives
}

/// Smallest eigenvalue by bisection on [`count_below`], starting from the
/// Gershgorin interval.
pub fn smallest_eigenvalue_bisection(h: &DMatrix<C64>, tol: f64) -> Result<f64> {
    check_hermitian(h)?;
    let n = h.nrows();
    let radius = (0..n).map(|i| (0..n).map(|j| h[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if count_below(h, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
