use super::{VectorQuery, VectorSample};
use crate::error::check_index;
use crate::{Error, Result, C64};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Explicitly stored vector exposed through query access.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryVector {
    entries: Vec<C64>,
}

impl QueryVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector dimension must be positive".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("vector entries must be finite".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_i` (1-based) of dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        check_index(i, dim)?;
        let mut entries = vec![C64::new(0.0, 0.0); dim];
        entries[i - 1] = C64::new(1.0, 0.0);
        Ok(Self { entries })
    }

    /// Uniform superposition over the given (1-based, distinct) basis indices.
    pub fn subset_state(dim: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidInput("subset state needs a nonempty support".into()));
        }
        let amp = C64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
        let mut entries = vec![C64::new(0.0, 0.0); dim];
        for &i in support {
            check_index(i, dim)?;
            if entries[i - 1] != C64::new(0.0, 0.0) {
                return Err(Error::InvalidInput(format!("duplicate support index {i}")));
            }
            entries[i - 1] = amp;
        }
        Ok(Self { entries })
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.entries)
    }
}

impl VectorQuery for QueryVector {
    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn entry(&self, i: usize) -> Result<C64> {
        check_index(i, self.entries.len())?;
        Ok(self.entries[i - 1])
    }
}

fn euclidean_norm(v: &[C64]) -> f64 {
    // Scaled accumulation so huge or tiny entries do not over/underflow.
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = v.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * sum.sqrt()
}

/// A vector with sampling access: query access, an inverse-CDF sampler and a
/// norm estimate.
#[derive(Clone, Debug)]
pub struct SampledVector {
    base: QueryVector,
    cdf: Vec<f64>,
    norm_estimate: f64,
    zeta: f64,
}

impl SampledVector {
    fn from_probabilities(base: QueryVector, probs: &[f64], norm_estimate: f64, zeta: f64) -> Self {
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in probs {
            acc += p;
            cdf.push(acc);
        }
        // Pin the tail to exactly 1 from the last index with positive mass, so
        // every uniform draw in [0, 1) lands on a nonzero entry.
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            for c in &mut cdf[last..] {
                *c = 1.0;
            }
        }
        Self { base, cdf, norm_estimate, zeta }
    }

    pub fn base(&self) -> &QueryVector {
        &self.base
    }

    /// Probability that the sampler emits index `i` (1-based).
    pub fn probability(&self, i: usize) -> Result<f64> {
        check_index(i, self.cdf.len())?;
        let lo = if i == 1 { 0.0 } else { self.cdf[i - 2] };
        Ok(self.cdf[i - 1] - lo)
    }
}

impl VectorQuery for SampledVector {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn entry(&self, i: usize) -> Result<C64> {
        self.base.entry(i)
    }
}

impl VectorSample for SampledVector {
    fn sample_index(&self, rng: &mut dyn RngCore) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u) + 1
    }

    fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    fn zeta(&self) -> f64 {
        self.zeta
    }
}

fn squared_weights(v: &QueryVector) -> Result<(Vec<f64>, f64)> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("sampling access needs a nonzero vector".into()));
    }
    let q = v.as_slice().iter().map(|z| (z / norm).norm_sqr()).collect();
    Ok((q, norm))
}

/// Perfect (`zeta = 0`) sampling access to an explicitly stored vector.
pub fn exact_sampler(v: QueryVector) -> Result<SampledVector> {
    let (q, norm) = squared_weights(&v)?;
    Ok(SampledVector::from_probabilities(v, &q, norm, 0.0))
}

/// `zeta`-sampling access with a seeded pseudo-random distortion pattern.
///
/// Each probability is scaled by a factor `1 + zeta * s_j` with `s_j` drawn
/// from `{-1, +1}`, recentred so the scaled weights still sum to one, and the
/// norm estimate is `||v|| (1 +/- zeta)` with a seeded sign.
pub fn distorted_sampler(v: QueryVector, zeta: f64, seed: u64) -> Result<SampledVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pattern: Vec<f64> = (0..v.dim()).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let norm_direction = if rng.random::<bool>() { 1.0 } else { -1.0 };
    distorted_sampler_with_pattern(v, zeta, &pattern, norm_direction)
}

/// `zeta`-sampling access with a caller-chosen distortion pattern.
///
/// `pattern[j]` in `[-1, 1]` steers the multiplicative perturbation of the
/// probability of index `j + 1`; `norm_direction` in `[-1, 1]` steers the norm
/// estimate to `||v|| (1 + zeta * norm_direction)`. The pattern is recentred
/// (weighted by `|v_j|^2`) so no renormalisation is needed, then rescaled so
/// the largest factor sits on the edge of the band.
pub fn distorted_sampler_with_pattern(
    v: QueryVector,
    zeta: f64,
    pattern: &[f64],
    norm_direction: f64,
) -> Result<SampledVector> {
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::InvalidInput(format!("distortion must lie in [0, 1), got {zeta}")));
    }
    if pattern.len() != v.dim() {
        return Err(Error::Shape(format!("pattern has {} entries, vector has {}", pattern.len(), v.dim())));
    }
    if !(-1.0..=1.0).contains(&norm_direction) {
        return Err(Error::InvalidInput("norm direction must lie in [-1, 1]".into()));
    }
    let (q, norm) = squared_weights(&v)?;
    let mean: f64 = q.iter().zip(pattern).map(|(qj, s)| qj * s).sum();
    let mut centred: Vec<f64> = pattern.iter().map(|s| s - mean).collect();
    let peak = q
        .iter()
        .zip(&centred)
        .filter(|(qj, _)| **qj > 0.0)
        .map(|(_, s)| s.abs())
        .fold(0.0, f64::max);
    if peak > 0.0 {
        centred.iter_mut().for_each(|s| *s /= peak);
    }
    let mut probs: Vec<f64> = q.iter().zip(&centred).map(|(qj, s)| qj * (1.0 + zeta * s)).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);

    for (j, (p, qj)) in probs.iter().zip(&q).enumerate() {
        if *qj == 0.0 {
            continue;
        }
        let ratio = p / qj;
        if ratio < 1.0 - zeta - 1e-12 || ratio > 1.0 + zeta + 1e-12 {
            return Err(Error::Construction(format!(
                "distorted probability of index {} leaves the band (ratio {ratio})",
                j + 1
            )));
        }
    }
    let norm_estimate = norm * (1.0 + zeta * norm_direction);
    Ok(SampledVector::from_probabilities(v, &probs, norm_estimate, zeta))
}
