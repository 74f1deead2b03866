use super::cheb::{clenshaw, interpolate};
use crate::{Error, Result};

/// Representation of the coefficients of an [`EvenPolynomial`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `coeffs[k]` multiplies `x^{2k}`.
    Monomial,
    /// `coeffs[k]` multiplies `T_{2k}(x) = T_k(2x^2 - 1)`.
    Chebyshev,
}

/// Degree above which monomial coefficients are too ill-conditioned to trust.
pub const MONOMIAL_CONDITIONING_LIMIT: usize = 30;

/// Even real polynomial; only even-order coefficients are stored, so
/// `P(x) == P(-x)` holds bit-for-bit.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenPolynomial {
    basis: Basis,
    coeffs: Vec<f64>,
}

impl EvenPolynomial {
    /// From monomial coefficients `a_0, a_2, ..., a_{2d}`.
    pub fn monomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::with_basis(Basis::Monomial, coeffs)
    }

    /// From Chebyshev coefficients of `T_0, T_2, ..., T_{2d}`.
    pub fn chebyshev(coeffs: Vec<f64>) -> Result<Self> {
        Self::with_basis(Basis::Chebyshev, coeffs)
    }

    pub fn with_basis(basis: Basis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { basis: Basis::Monomial, coeffs: vec![c] }
    }

    /// `x^2`.
    pub fn square() -> Self {
        Self { basis: Basis::Monomial, coeffs: vec![0.0, 1.0] }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Nominal degree `2d` (trailing zero coefficients included).
    pub fn degree(&self) -> usize {
        2 * (self.coeffs.len() - 1)
    }

    /// Half the degree: the number of `A^† A` factors in the top term.
    pub fn half_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        match self.basis {
            Basis::Monomial => self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x2 + a),
            Basis::Chebyshev => clenshaw(&self.coeffs, 2.0 * x2 - 1.0),
        }
    }

    /// Monomial form. Logs a conditioning warning above degree 30.
    pub fn to_monomial(&self) -> EvenPolynomial {
        if self.basis == Basis::Monomial {
            return self.clone();
        }
        if self.degree() > MONOMIAL_CONDITIONING_LIMIT {
            log::warn!(
                "converting a degree-{} polynomial to monomial form; coefficients are ill-conditioned",
                self.degree()
            );
        }
        let top = self.degree();
        // Monomial coefficients of T_n(x), built by T_{n+1} = 2x T_n - T_{n-1}.
        let mut prev = vec![0.0; top + 1];
        let mut cur = vec![0.0; top + 1];
        prev[0] = 1.0;
        if top >= 1 {
            cur[1] = 1.0;
        }
        let mut out = vec![0.0; self.coeffs.len()];
        out[0] += self.coeffs[0];
        for n in 1..=top {
            if n % 2 == 0 {
                let c = self.coeffs[n / 2];
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c * cur[2 * k];
                }
            }
            if n < top {
                let mut next = vec![0.0; top + 1];
                for k in 0..top {
                    next[k + 1] += 2.0 * cur[k];
                }
                for k in 0..=top {
                    next[k] -= prev[k];
                }
                prev = std::mem::replace(&mut cur, next);
            }
        }
        EvenPolynomial { basis: Basis::Monomial, coeffs: out }
    }

    /// Chebyshev form, by interpolation in `y = 2x^2 - 1`.
    pub fn to_chebyshev(&self) -> EvenPolynomial {
        if self.basis == Basis::Chebyshev {
            return self.clone();
        }
        let d = self.half_degree();
        let coeffs = interpolate(d, |y| self.eval(((y + 1.0) / 2.0).max(0.0).sqrt()));
        EvenPolynomial { basis: Basis::Chebyshev, coeffs }
    }

    /// Maximum of `|P|` over a uniform grid on `[-1, 1]`.
    pub fn sup_norm_on_grid(&self, points: usize) -> f64 {
        let points = points.max(2);
        (0..points)
            .map(|k| self.eval(-1.0 + 2.0 * k as f64 / (points - 1) as f64).abs())
            .fold(0.0, f64::max)
    }
}
