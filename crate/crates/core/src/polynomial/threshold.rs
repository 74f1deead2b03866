use super::cheb::interpolate;
use super::even::EvenPolynomial;
use super::sign::{build_sign_approx_with_min_degree, OddPolynomial, MAX_SIGN_DEGREE};
use crate::{Error, Result};

/// Default number of grid points per certified region.
pub const THRESHOLD_GRID: usize = 10_000;

/// Violations up to this size count as satisfied.
pub const THRESHOLD_TOL: f64 = 1e-9;

/// Measured constant `C` with `degree <= C (1/theta_1 + 1/theta_2) ln(1/chi)`
/// for thresholds from [`build_threshold`]. Symmetric margins land near 4;
/// strongly asymmetric ones (one wide margin contributing little to the sum)
/// reach about 8.
pub const THRESHOLD_DEGREE_CONSTANT: f64 = 8.5;

/// Parameters of a threshold polynomial: close to 1 on `[t1, t2]`, close to 0
/// on `[0, t1 - theta1]` and `[t2 + theta2, 1]`.
///
/// `t1 == t2` is accepted (a single target point).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdSpec {
    pub t1: f64,
    pub t2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub chi: f64,
}

impl ThresholdSpec {
    pub fn new(t1: f64, t2: f64, theta1: f64, theta2: f64, chi: f64) -> Result<Self> {
        let spec = Self { t1, t2, theta1, theta2, chi };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { t1, t2, theta1, theta2, chi } = *self;
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(t1) && unit(t2) && unit(theta1) && unit(theta2)) {
            return Err(Error::InvalidInput("interval parameters must lie in [0, 1]".into()));
        }
        if !(theta1 > 0.0 && theta2 > 0.0) {
            return Err(Error::InvalidInput("margins theta1, theta2 must be positive".into()));
        }
        if !(theta1 <= t1 && t1 <= t2 && t2 <= 1.0 - theta2) {
            return Err(Error::InvalidInput(format!(
                "need theta1 <= t1 <= t2 <= 1 - theta2, got theta1={theta1} t1={t1} t2={t2} theta2={theta2}"
            )));
        }
        if !(chi > 0.0 && chi < 1.0) {
            return Err(Error::InvalidInput(format!("chi must lie in (0, 1), got {chi}")));
        }
        Ok(())
    }

    /// Sign-approximation accuracy used by the construction, `2 chi / 5`.
    pub fn xi(&self) -> f64 {
        2.0 * self.chi / 5.0
    }

    /// The region boxes `(name, lo, hi, lower bound, upper bound)` a threshold
    /// polynomial must satisfy.
    pub fn regions(&self) -> Vec<(&'static str, f64, f64, f64, f64)> {
        vec![
            ("bounded", -1.0, 1.0, -1.0, 1.0),
            ("inside", self.t1, self.t2, 1.0 - self.chi, 1.0),
            ("outside_low", 0.0, self.t1 - self.theta1, 0.0, self.chi),
            ("outside_high", self.t2 + self.theta2, 1.0, 0.0, self.chi),
        ]
    }
}

/// Outcome of checking one region on a uniform grid.
#[derive(Clone, Debug)]
pub struct RegionCheck {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Largest distance outside `[lower_bound, upper_bound]`, or a negative
    /// slack when every point is strictly inside.
    pub max_violation: f64,
    pub worst_x: f64,
    pub points: usize,
}

impl RegionCheck {
    pub fn passed(&self) -> bool {
        self.max_violation <= THRESHOLD_TOL
    }
}

#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub regions: Vec<RegionCheck>,
}

impl ThresholdReport {
    pub fn passed(&self) -> bool {
        self.regions.iter().all(RegionCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RegionCheck> {
        self.regions.iter().filter(|r| !r.passed())
    }

    pub fn region(&self, name: &str) -> Option<&RegionCheck> {
        self.regions.iter().find(|r| r.name == name)
    }
}

pub(crate) fn check_region(
    f: &impl Fn(f64) -> f64,
    name: &'static str,
    (lo, hi): (f64, f64),
    (lower_bound, upper_bound): (f64, f64),
    grid: usize,
) -> RegionCheck {
    let points = if hi > lo { grid.max(2) } else { 1 };
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_x = lo;
    for k in 0..points {
        let x = if points == 1 { lo } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 };
        let v = f(x);
        let violation = (lower_bound - v).max(v - upper_bound);
        if violation > max_violation || v.is_nan() {
            max_violation = if v.is_nan() { f64::INFINITY } else { violation };
            worst_x = x;
        }
    }
    RegionCheck { name, lo, hi, lower_bound, upper_bound, max_violation, worst_x, points }
}

/// Grid certificate for the threshold boxes. Every region is sampled at
/// `grid` uniform points (one point if the region is degenerate).
pub fn verify_threshold(p: &EvenPolynomial, spec: &ThresholdSpec, grid: usize) -> ThresholdReport {
    verify_threshold_fn(&|x| p.eval(x), spec, grid)
}

pub(crate) fn verify_threshold_fn(f: &impl Fn(f64) -> f64, spec: &ThresholdSpec, grid: usize) -> ThresholdReport {
    let regions = spec
        .regions()
        .into_iter()
        .filter(|&(_, lo, hi, _, _)| hi >= lo)
        .map(|(name, lo, hi, lb, ub)| check_region(f, name, (lo, hi), (lb, ub), grid))
        .collect();
    ThresholdReport { regions }
}

/// The pieces of the threshold construction before it is collapsed into a
/// single even polynomial.
///
/// With `P1` and `P2` sign approximations for margins `theta1/2` and
/// `theta2/2` at accuracy `xi = 2 chi / 5`:
///
/// ```text
/// Q(x) = (1 - xi) (P1(x - t1 + theta1/2) + P2(-x + t2 + theta2/2)) / 2 + xi
/// P(x) = (Q(x) + Q(-x)) / (1 + xi)
/// ```
#[derive(Clone, Debug)]
pub struct ThresholdConstruction {
    pub spec: ThresholdSpec,
    pub left: OddPolynomial,
    pub right: OddPolynomial,
}

impl ThresholdConstruction {
    pub fn new(spec: ThresholdSpec) -> Result<Self> {
        Self::with_min_degree(spec, 1)
    }

    fn with_min_degree(spec: ThresholdSpec, min_degree: usize) -> Result<Self> {
        spec.validate()?;
        let xi = spec.xi();
        let left = build_sign_approx_with_min_degree(spec.theta1 / 2.0, xi, min_degree)?;
        let right = if spec.theta2 == spec.theta1 {
            left.clone()
        } else {
            build_sign_approx_with_min_degree(spec.theta2 / 2.0, xi, min_degree)?
        };
        Ok(Self { spec, left, right })
    }

    /// The asymmetric intermediate `Q`.
    pub fn q(&self, x: f64) -> f64 {
        let s = &self.spec;
        let xi = s.xi();
        let a = self.left.eval(x - s.t1 + s.theta1 / 2.0);
        let b = self.right.eval(-x + s.t2 + s.theta2 / 2.0);
        (1.0 - xi) * (a + b) / 2.0 + xi
    }

    /// The symmetrised threshold polynomial, evaluated from its parts.
    pub fn value(&self, x: f64) -> f64 {
        (self.q(x) + self.q(-x)) / (1.0 + self.spec.xi())
    }

    pub fn degree(&self) -> usize {
        let d = self.left.degree().max(self.right.degree());
        // The top odd power cancels under symmetrisation.
        d - d % 2
    }

    /// Collapses the construction into Chebyshev coefficients of `T_{2k}`.
    pub fn to_even_polynomial(&self) -> Result<EvenPolynomial> {
        let half = self.degree() / 2;
        let coeffs = interpolate(half, |y| self.value(((y + 1.0) / 2.0).max(0.0).sqrt()));
        EvenPolynomial::chebyshev(coeffs)
    }
}

/// Even polynomial with `|P| <= 1` on `[-1, 1]`, `P in [1 - chi, 1]` on
/// `[t1, t2]` and `P in [0, chi]` on `[0, t1 - theta1] U [t2 + theta2, 1]`,
/// certified on a grid. On certification failure the sign-approximation
/// degree is doubled until the cap.
pub fn build_threshold(spec: &ThresholdSpec) -> Result<EvenPolynomial> {
    let mut construction = ThresholdConstruction::new(*spec)?;
    loop {
        let p = construction.to_even_polynomial()?;
        let report = verify_threshold(&p, spec, THRESHOLD_GRID);
        if report.passed() {
            return Ok(p);
        }
        let next = 2 * construction.left.degree().max(construction.right.degree()) + 1;
        if next > MAX_SIGN_DEGREE {
            let worst = report.failures().next().map(|r| r.name).unwrap_or("?");
            return Err(Error::Construction(format!("threshold polynomial failed certification in region {worst}")));
        }
        log::debug!("threshold certification failed; retrying with sign degree {next}");
        construction = ThresholdConstruction::with_min_degree(*spec, next)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_spec() -> ThresholdSpec {
        ThresholdSpec::new(0.5, 0.7, 0.1, 0.1, 0.01).unwrap()
    }

    #[test]
    fn reference_boxes_hold() {
        let spec = reference_spec();
        let p = build_threshold(&spec).unwrap();
        let report = verify_threshold(&p, &spec, 10_000);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn midpoint_and_origin() {
        let spec = reference_spec();
        let p = build_threshold(&spec).unwrap();
        assert!(p.eval(0.6) >= 1.0 - spec.chi);
        let at0 = p.eval(0.0);
        assert!((0.0..=spec.chi).contains(&at0), "{at0}");
    }

    #[test]
    fn square_fails_inside() {
        let spec = reference_spec();
        let report = verify_threshold(&EvenPolynomial::square(), &spec, 1000);
        assert!(!report.passed());
        let inside = report.region("inside").unwrap();
        assert!(!inside.passed());
        // Worst point is t1 = 0.5 where x^2 = 0.25; at 0.6 it is already 0.36 < 0.99.
        assert!((inside.max_violation - (0.99 - 0.25)).abs() < 1e-12);
        assert!((EvenPolynomial::square().eval(0.6) - 0.36).abs() < 1e-15);
    }

    #[test]
    fn constant_one_fails_outside() {
        let spec = reference_spec();
        let report = verify_threshold(&EvenPolynomial::constant(1.0), &spec, 1000);
        assert!(!report.passed());
        assert!(report.failures().any(|r| r.name.starts_with("outside")));
    }

    #[test]
    fn intermediate_q_bounds() {
        let spec = reference_spec();
        let c = ThresholdConstruction::new(spec).unwrap();
        let xi = spec.xi();
        let q = |x| c.q(x);
        assert!(check_region(&q, "in", (spec.t1, spec.t2), (1.0 - xi, 1.0), 10_000).passed());
        assert!(check_region(&q, "lo", (0.0, spec.t1 - spec.theta1), (0.0, 1.5 * xi), 10_000).passed());
        assert!(check_region(&q, "hi", (spec.t2 + spec.theta2, 1.0), (0.0, 1.5 * xi), 10_000).passed());
        assert!(check_region(&q, "unit", (0.0, 1.0), (0.0, 1.0), 10_000).passed());
        // On [-1, 0] only the 3xi/2 bound is guaranteed: P1 ~ -1 and P2 ~ +1 there,
        // so truncation ripple can lift Q slightly above xi.
        assert!(check_region(&q, "neg", (-1.0, 0.0), (0.0, 1.5 * xi), 10_000).passed());
    }

    #[test]
    fn collapsed_polynomial_matches_parts() {
        let spec = ThresholdSpec::new(0.3, 0.6, 0.2, 0.15, 0.05).unwrap();
        let c = ThresholdConstruction::new(spec).unwrap();
        let p = c.to_even_polynomial().unwrap();
        for k in 0..=200 {
            let x = -1.0 + k as f64 / 100.0;
            assert!((p.eval(x) - c.value(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_target_point() {
        let spec = ThresholdSpec::new(0.5, 0.5, 0.5, 0.125, 0.1).unwrap();
        let p = build_threshold(&spec).unwrap();
        assert!(p.eval(0.5) >= 0.9);
    }

    #[test]
    fn invalid_specs() {
        assert!(ThresholdSpec::new(0.05, 0.7, 0.1, 0.1, 0.01).is_err());
        assert!(ThresholdSpec::new(0.5, 0.95, 0.1, 0.1, 0.01).is_err());
        assert!(ThresholdSpec::new(0.7, 0.5, 0.1, 0.1, 0.01).is_err());
        assert!(ThresholdSpec::new(0.5, 0.7, 0.1, 0.1, 1.0).is_err());
        assert!(ThresholdSpec::new(0.5, 0.7, 0.0, 0.1, 0.1).is_err());
    }
}
