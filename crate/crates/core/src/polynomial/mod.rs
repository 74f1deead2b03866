//! Even polynomials, odd sign approximations and threshold polynomials.

mod cheb;
mod even;
mod sign;
mod threshold;

pub use even::{Basis, EvenPolynomial, MONOMIAL_CONDITIONING_LIMIT};
pub use sign::{
    build_sign_approx, certify_sign_approx, OddPolynomial, SignCertificate, MAX_SIGN_DEGREE, SIGN_DEGREE_CONSTANT,
    SIGN_DOMAIN, SIGN_GRID,
};
pub use threshold::{
    build_threshold, verify_threshold, RegionCheck, ThresholdConstruction, ThresholdReport, ThresholdSpec,
    THRESHOLD_DEGREE_CONSTANT, THRESHOLD_GRID, THRESHOLD_TOL,
};
