//! Sampling estimator for bilinear forms `v^† P(sqrt(A^† A)) u`.

use super::entry::{QueryStats, SvtEvaluator};
use crate::access::{SparseQuery, VectorQuery, VectorSample};
use crate::polynomial::EvenPolynomial;
use crate::{Error, Result, C64};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Precision, confidence and reproducibility settings for [`estimate_bilinear`].
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub fail_prob: f64,
    /// Samples averaged per batch.
    pub samples: usize,
    /// Batches whose means are combined by a median.
    pub batches: usize,
    pub seed: u64,
    pub memoize: bool,
}

impl EstimatorConfig {
    /// Smallest sample and batch counts meeting `(epsilon, fail_prob)` for a
    /// sampler with distortion `zeta`.
    pub fn new(epsilon: f64, fail_prob: f64, zeta: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if !(fail_prob > 0.0 && fail_prob < 1.0) {
            return Err(Error::Config(format!("failure probability must lie in (0, 1), got {fail_prob}")));
        }
        check_zeta(zeta, epsilon)?;
        Ok(Self {
            epsilon,
            fail_prob,
            samples: sample_count(epsilon, zeta),
            batches: batch_count(fail_prob),
            seed,
            memoize: true,
        })
    }

    pub fn total_samples(&self) -> usize {
        self.samples * self.batches
    }

    fn validate(&self, zeta: f64) -> Result<()> {
        check_zeta(zeta, self.epsilon)?;
        let r = sample_count(self.epsilon, zeta);
        if self.samples < r {
            return Err(Error::Config(format!("{} samples per batch is below the required {r}", self.samples)));
        }
        let k = batch_count(self.fail_prob);
        if self.batches < k {
            return Err(Error::Config(format!("{} batches is below the required {k}", self.batches)));
        }
        Ok(())
    }
}

fn check_zeta(zeta: f64, epsilon: f64) -> Result<()> {
    if !(0.0..=epsilon / 8.0).contains(&zeta) {
        return Err(Error::Config(format!("sampler distortion {zeta} exceeds epsilon/8 = {}", epsilon / 8.0)));
    }
    Ok(())
}

/// `ceil(16 (1 + 7 zeta)^2 / (epsilon - 7 zeta)^2)`.
pub fn sample_count(epsilon: f64, zeta: f64) -> usize {
    let num = 16.0 * (1.0 + 7.0 * zeta).powi(2);
    let den = (epsilon - 7.0 * zeta).powi(2);
    (num / den).ceil() as usize
}

/// `ceil(18 ln(1 / fail_prob))`, at least 1.
pub fn batch_count(fail_prob: f64) -> usize {
    ((18.0 * (1.0 / fail_prob).ln()).ceil() as usize).max(1)
}

/// Result of [`estimate_bilinear`] with bookkeeping for run reports.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: C64,
    pub samples: usize,
    pub batches: usize,
    /// Oracle calls a fresh evaluation per sample would make.
    pub stats: QueryStats,
    /// Distinct entries actually evaluated.
    pub distinct_entries: usize,
}

/// Computes the entries `w_j = (P(sqrt(A^†A)) u)_j` lazily, each at most once.
///
/// Entries are deterministic, so reusing them across samples does not change
/// the distribution of any sample; the query count of the first evaluation is
/// charged again on every reuse so reported work matches independent samples.
struct EntryCache<'a> {
    a: &'a (dyn SparseQuery + Sync),
    u: &'a (dyn VectorQuery + Sync),
    p: &'a EvenPolynomial,
    eval: SvtEvaluator,
    slots: Vec<OnceLock<std::result::Result<(C64, QueryStats), String>>>,
}

impl<'a> EntryCache<'a> {
    fn new(a: &'a (dyn SparseQuery + Sync), u: &'a (dyn VectorQuery + Sync), p: &'a EvenPolynomial, memoize: bool) -> Self {
        let slots = (0..u.dim()).map(|_| OnceLock::new()).collect();
        Self { a, u, p, eval: SvtEvaluator::new(memoize), slots }
    }

    fn get(&self, j: usize) -> Result<(C64, QueryStats)> {
        self.slots[j - 1]
            .get_or_init(|| self.eval.entry(self.a, self.u, self.p, j).map_err(|e| e.to_string()))
            .clone()
            .map_err(Error::Inconsistency)
    }

    fn distinct(&self) -> usize {
        self.slots.iter().filter(|s| s.get().is_some()).count()
    }
}

fn check_shapes(a: &dyn SparseQuery, u: &dyn VectorQuery, v: &dyn VectorSample) -> Result<()> {
    if a.cols() != u.dim() {
        return Err(Error::Shape(format!("matrix has {} columns, u has dimension {}", a.cols(), u.dim())));
    }
    if v.dim() != u.dim() {
        return Err(Error::Shape(format!("v has dimension {}, u has {}", v.dim(), u.dim())));
    }
    Ok(())
}

fn draw(cache: &EntryCache<'_>, v: &dyn VectorSample, rng: &mut dyn RngCore) -> Result<(C64, QueryStats)> {
    let j = v.sample_index(rng);
    let vj = v.entry(j)?;
    if vj == C64::new(0.0, 0.0) {
        return Err(Error::InvalidSampler(j));
    }
    let (w, mut stats) = cache.get(j)?;
    stats.vector_queries += 1;
    let m = v.norm_estimate();
    Ok((w * (m * m) / vj, stats))
}

/// One draw `X = w_j m^2 / v_j` with `j` from the sampler of `v`.
pub fn single_sample(
    a: &(dyn SparseQuery + Sync),
    u: &(dyn VectorQuery + Sync),
    v: &dyn VectorSample,
    p: &EvenPolynomial,
    rng: &mut dyn RngCore,
) -> Result<C64> {
    check_shapes(a, u, v)?;
    let cache = EntryCache::new(a, u, p, true);
    draw(&cache, v, rng).map(|(x, _)| x)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const DRAW_CHUNK: usize = 4096;

/// `count` independent draws of [`single_sample`], reproducible from `seed`
/// regardless of the number of worker threads.
pub fn draw_samples(
    a: &(dyn SparseQuery + Sync),
    u: &(dyn VectorQuery + Sync),
    v: &(dyn VectorSample + Sync),
    p: &EvenPolynomial,
    count: usize,
    seed: u64,
) -> Result<Vec<C64>> {
    check_shapes(a, u, v)?;
    let cache = EntryCache::new(a, u, p, true);
    let chunks: Vec<Result<Vec<C64>>> = (0..count.div_ceil(DRAW_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = DRAW_CHUNK.min(count - c * DRAW_CHUNK);
            (0..len).map(|_| draw(&cache, v, &mut rng).map(|(x, _)| x)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median over batches of the mean of single samples, taken separately for
/// the real and imaginary parts.
pub fn estimate_bilinear(
    a: &(dyn SparseQuery + Sync),
    u: &(dyn VectorQuery + Sync),
    v: &(dyn VectorSample + Sync),
    p: &EvenPolynomial,
    cfg: &EstimatorConfig,
) -> Result<Estimate> {
    check_shapes(a, u, v)?;
    cfg.validate(v.zeta())?;
    let cache = EntryCache::new(a, u, p, cfg.memoize);
    let batches: Vec<Result<(C64, QueryStats)>> = (0..cfg.batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(cfg.seed, b as u64);
            let mut sum = C64::new(0.0, 0.0);
            let mut stats = QueryStats::default();
            for _ in 0..cfg.samples {
                let (x, s) = draw(&cache, v, &mut rng)?;
                sum += x;
                stats += s;
            }
            Ok((sum / cfg.samples as f64, stats))
        })
        .collect();
    let mut re = Vec::with_capacity(cfg.batches);
    let mut im = Vec::with_capacity(cfg.batches);
    let mut stats = QueryStats::default();
    for b in batches {
        let (mean, s) = b?;
        re.push(mean.re);
        im.push(mean.im);
        stats += s;
    }
    Ok(Estimate {
        value: C64::new(median(&mut re), median(&mut im)),
        samples: cfg.samples,
        batches: cfg.batches,
        stats,
        distinct_entries: cache.distinct(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{exact_sampler, QueryVector, SparseMatrix};

    #[test]
    fn counts_follow_formulas() {
        assert_eq!(sample_count(0.1, 0.0), 1600);
        assert_eq!(batch_count(0.01), 83);
        assert_eq!(batch_count(0.999), 1);
        assert!(sample_count(0.1, 0.01) > sample_count(0.1, 0.0));
    }

    #[test]
    fn zeta_above_limit_is_rejected() {
        assert!(matches!(EstimatorConfig::new(0.08, 0.1, 0.011, 1), Err(Error::Config(_))));
        assert!(EstimatorConfig::new(0.08, 0.1, 0.01, 1).is_ok());
        assert!(matches!(EstimatorConfig::new(0.0, 0.1, 0.0, 1), Err(Error::Config(_))));
        assert!(matches!(EstimatorConfig::new(0.1, 1.0, 0.0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn undersized_config_is_rejected() {
        let a = SparseMatrix::identity(2).unwrap();
        let u = QueryVector::basis(2, 1).unwrap();
        let v = exact_sampler(u.clone()).unwrap();
        let mut cfg = EstimatorConfig::new(0.5, 0.1, 0.0, 1).unwrap();
        cfg.samples -= 1;
        let p = EvenPolynomial::constant(1.0);
        assert!(matches!(estimate_bilinear(&a, &u, &v, &p, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn point_mass_is_exact() {
        let a = SparseMatrix::from_dense(2, 2, &[C64::new(0.3, 0.0), C64::new(0.1, 0.2), C64::new(0.0, 0.0), C64::new(0.5, 0.0)], None).unwrap();
        let u = QueryVector::basis(2, 1).unwrap();
        let v = exact_sampler(u.clone()).unwrap();
        let cfg = EstimatorConfig::new(0.2, 0.05, 0.0, 3).unwrap();
        let est = estimate_bilinear(&a, &u, &v, &EvenPolynomial::constant(1.0), &cfg).unwrap();
        assert_eq!(est.value, C64::new(1.0, 0.0));
    }

    #[test]
    fn zero_matrix_gives_zero_draws() {
        let a = SparseMatrix::from_triplets(3, 3, vec![], Some(1)).unwrap();
        let u = QueryVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let v = exact_sampler(QueryVector::from_real(&[0.5, 0.5, 0.5]).unwrap()).unwrap();
        let xs = draw_samples(&a, &u, &v, &EvenPolynomial::square(), 100, 9).unwrap();
        assert!(xs.iter().all(|x| *x == C64::new(0.0, 0.0)));
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = SparseMatrix::diagonal(&[C64::new(0.9, 0.0), C64::new(0.4, 0.0), C64::new(0.2, 0.0)]).unwrap();
        let u = QueryVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let v = exact_sampler(QueryVector::from_real(&[0.5, 0.7, 0.5]).unwrap()).unwrap();
        let cfg = EstimatorConfig::new(0.3, 0.1, 0.0, 42).unwrap();
        let p = EvenPolynomial::square();
        let e1 = estimate_bilinear(&a, &u, &v, &p, &cfg).unwrap();
        let e2 = estimate_bilinear(&a, &u, &v, &p, &cfg).unwrap();
        assert_eq!(e1.value, e2.value);
        assert_eq!(e1.stats, e2.stats);
        let exact = 0.5 * 0.81 * 0.6 + 0.5 * 0.04 * 0.8;
        assert!((e1.value.re - exact).abs() < 0.3);
    }

    #[test]
    fn median_handles_even_counts() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0, 10.0]), 2.5);
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
    }
}
