//! Query and sampling access to vectors and sparse matrices.
//!
//! All indices at this interface are 1-based. Algorithms in the crate are
//! written against the [`VectorQuery`], [`VectorSample`] and [`SparseQuery`]
//! traits so they never see the underlying storage.

mod sparse;
mod vector;

pub use sparse::{Adjoint, SparseMatrix, SparseQuery};
pub use vector::{distorted_sampler, distorted_sampler_with_pattern, exact_sampler, QueryVector, SampledVector};

use crate::{Result, C64};
use rand::RngCore;

/// Deterministic per-index read access to a vector.
pub trait VectorQuery {
    fn dim(&self) -> usize;

    /// Entry `i` (1-based).
    fn entry(&self, i: usize) -> Result<C64>;
}

/// Query access plus a sampler close to the squared-magnitude distribution
/// and an estimate of the norm.
///
/// For distortion `zeta` the sampler's probability of `j` lies within a
/// factor `[1 - zeta, 1 + zeta]` of `|v_j|^2 / ||v||^2`, and the norm estimate
/// is within relative error `zeta` of `||v||`.
pub trait VectorSample: VectorQuery {
    /// Draws an index (1-based). Only indices with nonzero entries are emitted.
    fn sample_index(&self, rng: &mut dyn RngCore) -> usize;

    fn norm_estimate(&self) -> f64;

    fn zeta(&self) -> f64;
}
