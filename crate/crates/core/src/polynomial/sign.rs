use super::cheb::{clenshaw, scaled_bessel_i};
use crate::{Error, Result};
use statrs::function::erf::erfc_inv;

/// Half-width of the domain `[-2, 2]` on which sign approximations are certified.
pub const SIGN_DOMAIN: f64 = 2.0;

/// Largest sign-approximation degree tried before giving up.
pub const MAX_SIGN_DEGREE: usize = 16_384;

/// Grid points used to certify a sign approximation on `[-2, 2]`.
pub const SIGN_GRID: usize = 10_000;

/// Measured constant `C` such that [`build_sign_approx`] returns degree at most
/// `C * ln(1/xi) / eta` over the supported parameter range.
pub const SIGN_DEGREE_CONSTANT: f64 = 4.0;

const CERT_TOL: f64 = 1e-9;

/// Odd real polynomial stored as a Chebyshev series in `x / half_width`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddPolynomial {
    coeffs: Vec<f64>,
    half_width: f64,
}

impl OddPolynomial {
    /// `coeffs[k]` multiplies `T_k(x / half_width)`; even-order entries must be zero.
    pub fn from_chebyshev(coeffs: Vec<f64>, half_width: f64) -> Result<Self> {
        if coeffs.iter().step_by(2).any(|&c| c != 0.0) {
            return Err(Error::InvalidInput("odd polynomial has a nonzero even-order coefficient".into()));
        }
        if half_width.is_nan() || half_width <= 0.0 {
            return Err(Error::InvalidInput("half width must be positive".into()));
        }
        Ok(Self { coeffs, half_width })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, x / self.half_width)
    }
}

/// Chebyshev coefficients (in `t = x / 2`) of `erf(k x)` restricted to
/// `[-2, 2]`, via the Bessel-series expansion of the error function.
fn erf_chebyshev(k: f64, count: usize) -> Vec<f64> {
    // erf(a t) = (2a e^{-a^2/2} / sqrt(pi)) sum_j (-1)^j I_j(a^2/2)
    //            [T_{2j+1}(t)/(2j+1) - T_{2j-1}(t)/(2j-1)],  j = 0 term has no T_{-1} part.
    let a = SIGN_DOMAIN * k;
    let z = a * a / 2.0;
    let terms = count / 2 + 2;
    let bessel = scaled_bessel_i(z, terms);
    let pref = 2.0 * a / std::f64::consts::PI.sqrt();
    let mut c = vec![0.0; 2 * terms + 2];
    for (j, b) in bessel.iter().enumerate() {
        let w = pref * b * if j % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * j + 1] += w / (2 * j + 1) as f64;
        if j > 0 {
            c[2 * j - 1] -= w / (2 * j - 1) as f64;
        }
    }
    c.truncate(count);
    c
}

/// Certification of the three boxes required of a sign approximation.
#[derive(Clone, Debug)]
pub struct SignCertificate {
    /// Largest excursion of `|P'|` above 1 on `[-2, 2]`.
    pub bound_violation: f64,
    /// Largest shortfall below `1 - xi` on `[eta, 2]` (and, by oddness, on `[-2, -eta]`).
    pub plateau_violation: f64,
}

impl SignCertificate {
    pub fn passed(&self) -> bool {
        self.bound_violation <= CERT_TOL && self.plateau_violation <= CERT_TOL
    }
}

/// Grid check of `|P'| <= 1` on `[-2, 2]` and `P' >= 1 - xi` on `[eta, 2]`
/// plus `P' <= -1 + xi` on `[-2, -eta]`.
pub fn certify_sign_approx(p: &OddPolynomial, eta: f64, xi: f64, grid: usize) -> SignCertificate {
    let grid = grid.max(2);
    let mut bound_violation: f64 = 0.0;
    let mut plateau_violation: f64 = 0.0;
    let mut check = |x: f64| {
        let v = p.eval(x);
        bound_violation = bound_violation.max(v.abs() - 1.0);
        if x >= eta {
            plateau_violation = plateau_violation.max((1.0 - xi) - v);
        } else if x <= -eta {
            plateau_violation = plateau_violation.max(v - (-1.0 + xi));
        }
    };
    for k in 0..grid {
        check(-SIGN_DOMAIN + 2.0 * SIGN_DOMAIN * k as f64 / (grid - 1) as f64);
    }
    // The plateau edges are where the constraint is tightest.
    for x in [eta, -eta] {
        check(x);
    }
    let plateau = SIGN_DOMAIN - eta;
    for k in 0..grid {
        let x = eta + plateau * k as f64 / (grid - 1) as f64;
        check(x);
        check(-x);
    }
    SignCertificate { bound_violation, plateau_violation }
}

/// Odd polynomial with `P'(x) in [-1, 1]` on `[-2, 2]`, `P'(x) in [1 - xi, 1]`
/// on `[eta, 2]` and `P'(x) in [-1, -1 + xi]` on `[-2, -eta]`.
///
/// Built as a truncated, rescaled Chebyshev expansion of `erf(k x)` with
/// `erf(k eta) = 1 - xi/2`; the truncation keeps a coefficient tail of at most
/// `xi/4`. The result is certified on a grid, and the degree is doubled on
/// failure up to [`MAX_SIGN_DEGREE`].
pub fn build_sign_approx(eta: f64, xi: f64) -> Result<OddPolynomial> {
    build_sign_approx_with_min_degree(eta, xi, 1)
}

pub(crate) fn build_sign_approx_with_min_degree(eta: f64, xi: f64, min_degree: usize) -> Result<OddPolynomial> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::InvalidInput(format!("eta must be positive, got {eta}")));
    }
    if !(xi > 0.0 && xi < 0.5) {
        return Err(Error::InvalidInput(format!("xi must lie in (0, 1/2), got {xi}")));
    }
    let steepness = erfc_inv(xi / 2.0) / eta;
    let full = erf_chebyshev(steepness, 4 * MAX_SIGN_DEGREE + 2);

    // Suffix sums of |c_j| give the truncation error bound for each degree.
    let mut tail = vec![0.0; full.len() + 1];
    for j in (0..full.len()).rev() {
        tail[j] = tail[j + 1] + full[j].abs();
    }
    let mut degree = (1..full.len())
        .step_by(2)
        .find(|&n| tail[n + 1] <= xi / 4.0)
        .ok_or_else(|| {
            Error::Construction(format!("sign approximation for eta={eta}, xi={xi} needs degree above the cap"))
        })?
        .max(min_degree | 1);

    loop {
        if degree > MAX_SIGN_DEGREE {
            return Err(Error::Construction(format!(
                "sign approximation for eta={eta}, xi={xi} failed certification below degree {MAX_SIGN_DEGREE}"
            )));
        }
        let scale = 1.0 / (1.0 + tail[degree + 1]);
        let coeffs: Vec<f64> = full[..=degree].iter().map(|c| c * scale).collect();
        let p = OddPolynomial::from_chebyshev(coeffs, SIGN_DOMAIN)?;
        if certify_sign_approx(&p, eta, xi, SIGN_GRID).passed() {
            return Ok(p);
        }
        log::debug!("sign approximation of degree {degree} failed certification; doubling");
        degree = 2 * degree + 1;
    }
}
