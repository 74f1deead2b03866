//! Chebyshev-series helpers shared by the polynomial types.

use std::f64::consts::PI;

/// Evaluates `sum_k c[k] T_k(t)` by Clenshaw's recurrence.
pub(crate) fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + t * b1 - b2
}

/// Chebyshev coefficients of the degree-`n` interpolant of `f` at the `n + 1`
/// Chebyshev-Gauss nodes on `[-1, 1]`. Exact (up to rounding) when `f` is a
/// polynomial of degree at most `n`.
pub(crate) fn interpolate(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let m = n + 1;
    let period = 4 * m;
    let cos_table: Vec<f64> = (0..period).map(|j| (PI * j as f64 / (2 * m) as f64).cos()).collect();
    let values: Vec<f64> = (0..m).map(|k| f(cos_table[2 * k + 1])).collect();
    (0..m)
        .map(|j| {
            let sum: f64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * cos_table[(j * (2 * k + 1)) % period])
                .sum();
            let c = 2.0 * sum / m as f64;
            if j == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

/// Exponentially scaled modified Bessel functions `e^{-z} I_j(z)` for
/// `j = 0..count`, by Miller's backward recurrence normalised with
/// `e^z = I_0(z) + 2 sum_{j>=1} I_j(z)`.
pub(crate) fn scaled_bessel_i(z: f64, count: usize) -> Vec<f64> {
    assert!(z > 0.0, "bessel argument must be positive");
    let start = count + (10.0 * z.sqrt()) as usize + 40;
    let mut out = vec![0.0; count];
    let mut next = 0.0; // I_{j+1}
    let mut cur = 1e-280; // I_j
    let mut sum = 0.0; // 2 * sum_{k>j} I_k, scaled alongside
    for j in (1..=start).rev() {
        let prev = next + (2.0 * j as f64 / z) * cur;
        sum += 2.0 * cur;
        if j < count {
            out[j] = cur;
        }
        next = cur;
        cur = prev;
        if cur > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            sum *= s;
            out.iter_mut().for_each(|x| *x *= s);
        }
    }
    // cur now holds I_0.
    if count > 0 {
        out[0] = cur;
    }
    let total = sum + cur;
    out.iter_mut().for_each(|x| *x /= total);
    out
}
