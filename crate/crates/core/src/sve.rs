//! Deciding whether a sparse matrix has a singular value in an interval,
//! given a guide vector with a promised overlap onto that part of the
//! spectrum.

use crate::access::{SparseQuery, VectorSample};
use crate::polynomial::{build_threshold, EvenPolynomial, ThresholdSpec};
use crate::svt::{estimate_bilinear, Estimate, EstimatorConfig};
use crate::{Error, Result, C64};
use std::fmt;

/// Interval query on `A` with guide `u`.
///
/// `A` must satisfy `||A|| <= 1` and `u` must satisfy `||u|| <= 1`; neither
/// is checked here since both would cost a pass over the data.
pub struct SveProblem<'a> {
    pub a: &'a (dyn SparseQuery + Sync),
    pub u: &'a (dyn VectorSample + Sync),
    pub t1: f64,
    pub t2: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Promised overlap of `u` with the singular subspace in `[t1, t2]`.
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SveDecision {
    HasSingularValue,
    NoSingularValue,
}

impl fmt::Display for SveDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SveDecision::HasSingularValue => "HAS_SV",
            SveDecision::NoSingularValue => "NO_SV",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SveOutcome {
    pub decision: SveDecision,
    pub estimate: Estimate,
    pub degree: usize,
    /// Set when `Re z` lies strictly between the two promised bounds
    /// `delta^2/3` and `2 delta^2/3` shifted by the estimator precision, i.e.
    /// when the input may violate the promise.
    pub ambiguous: bool,
    /// `|Im z|` exceeds the estimator precision (the exact value is real).
    pub imaginary_excess: bool,
}

impl<'a> SveProblem<'a> {
    pub fn threshold_spec(&self) -> Result<ThresholdSpec> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidInput(format!("overlap delta must lie in (0, 1], got {}", self.delta)));
        }
        ThresholdSpec::new(self.t1, self.t2, self.theta1, self.theta2, chi(self.delta))
    }

    fn check_zeta(&self) -> Result<()> {
        let limit = self.delta * self.delta / 56.0;
        if self.u.zeta() > limit {
            return Err(Error::Config(format!(
                "guide sampler distortion {} exceeds delta^2/56 = {limit}",
                self.u.zeta()
            )));
        }
        Ok(())
    }
}

/// Threshold accuracy `delta^2 / 3`.
pub fn chi(delta: f64) -> f64 {
    delta * delta / 3.0
}

/// Estimator precision `delta^2 / 7`.
pub fn precision(delta: f64) -> f64 {
    delta * delta / 7.0
}

/// Decision cut `delta^2 / 2`.
pub fn cut(delta: f64) -> f64 {
    delta * delta / 2.0
}

/// Decision for a (possibly estimated) value of `u^† P(sqrt(A^†A)) u`.
pub fn decide_value(re: f64, delta: f64) -> SveDecision {
    if re > cut(delta) {
        SveDecision::HasSingularValue
    } else {
        SveDecision::NoSingularValue
    }
}

/// Builds the threshold polynomial for `p` and decides with the sampling
/// estimator at precision `delta^2/7` and failure probability `fail_prob`.
pub fn decide_singular_interval(p: &SveProblem<'_>, fail_prob: f64, seed: u64) -> Result<SveOutcome> {
    let spec = p.threshold_spec()?;
    p.check_zeta()?;
    let poly = build_threshold(&spec)?;
    decide_with_polynomial(p, &poly, fail_prob, seed)
}

/// As [`decide_singular_interval`] with a prebuilt threshold polynomial.
pub fn decide_with_polynomial(
    p: &SveProblem<'_>,
    poly: &EvenPolynomial,
    fail_prob: f64,
    seed: u64,
) -> Result<SveOutcome> {
    p.check_zeta()?;
    let eps = precision(p.delta);
    let cfg = EstimatorConfig::new(eps, fail_prob, p.u.zeta(), seed)?;
    let estimate = estimate_bilinear(p.a, p.u, p.u, poly, &cfg)?;
    let z: C64 = estimate.value;
    let d2 = p.delta * p.delta;
    let ambiguous = z.re > d2 / 3.0 + eps && z.re < 2.0 * d2 / 3.0 - eps;
    if ambiguous {
        log::warn!("estimate {:.6} falls between the promised bounds; the promise may not hold", z.re);
    }
    Ok(SveOutcome {
        decision: decide_value(z.re, p.delta),
        degree: poly.degree(),
        ambiguous,
        imaginary_excess: z.im.abs() >= eps,
        estimate,
    })
}
