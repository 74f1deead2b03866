//! Classical singular value transformation for sparse matrices.
//!
//! The crate evaluates entries of `P(sqrt(A^† A)) u` for even polynomials `P`
//! by local recursion over the nonzero pattern of `A`, estimates bilinear forms
//! `v^† P(sqrt(A^† A)) u` from samples of `v`, and builds on that to decide
//! whether a matrix has a singular value in an interval and to estimate ground
//! energies of local Hamiltonians from a guiding state.
//!
//! Data is only ever touched through the access traits in [`access`]:
//! per-index reads of vectors, the `l`-th nonzero of a sparse row or column,
//! and sampling proportional to squared magnitudes. The [`oracle`] module is
//! the dense brute-force ground truth used to cross-check everything else, and
//! [`kitaev`] generates guided Hamiltonian instances from small circuits.

pub mod access;
pub mod bench;
pub mod error;
pub mod hamiltonian;
pub mod instances;
pub mod io;
pub mod kitaev;
pub mod oracle;
pub mod polynomial;
pub mod sve;
pub mod svt;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
