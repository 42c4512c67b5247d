//! Hermite polynomials and Hermite functions.
//!
//! `hermite_eval` returns the physicists' polynomial itself, which overflows
//! doubles for large `n` and `|x|`; the overflow is reported as a range error.
//! The oscillator solvers use the normalized Hermite functions
//! `h_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))`, whose recurrence
//! stays O(1) everywhere in the classically allowed region.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITE_MAX_ORDER: usize = 200;

/// `(H_n(x), H_n'(x))` by the three-term recurrence.
pub fn hermite_eval(n: usize, x: f64) -> Result<(f64, f64)> {
    if n > HERMITE_MAX_ORDER {
        return Err(Error::HermiteOrder {
            n,
            max: HERMITE_MAX_ORDER,
        });
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    let deriv = 2.0 * n as f64 * prev;
    if !cur.is_finite() || !deriv.is_finite() {
        return Err(Error::HermiteRange { n, x });
    }
    Ok((cur, deriv))
}

/// Normalized Hermite functions `h_n` and `h_{n-1}` at real `x`.
pub fn hermite_function_pair(n: usize, x: f64) -> (f64, f64) {
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return (h0, 0.0);
    }
    let (mut prev, mut cur) = (0.0, h0);
    for k in 1..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `(h_n(x), h_n'(x))` for the normalized Hermite function.
pub fn hermite_function(n: usize, x: f64) -> (f64, f64) {
    let (h, hm1) = hermite_function_pair(n, x);
    (h, (2.0 * n as f64).sqrt() * hm1 - x * h)
}

/// `(h_n(z), h_n'(z))` continued to complex argument.
pub fn hermite_function_complex(n: usize, z: Complex64) -> (Complex64, Complex64) {
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * z * z).exp();
    let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), h0);
    for k in 1..=n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * z * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, (2.0 * n as f64).sqrt() * prev - z * cur)
}

/// `log(sqrt(2^n n! sqrt(pi)))`, so that `log|H_n| = log|h_n| + x^2/2 + c_n`.
pub fn hermite_log_norm(n: usize) -> f64 {
    let mut lf = 0.0;
    for k in 2..=n {
        lf += (k as f64).ln();
    }
    0.5 * (n as f64 * std::f64::consts::LN_2 + lf + 0.5 * std::f64::consts::PI.ln())
}

/// `H_{n-1}(z) / H_n(z)` by the ratio recurrence
/// `r_1 = 2z, r_k = 2z - 2(k-1)/r_{k-1}` with `r_k = H_k/H_{k-1}`.
pub fn hermite_ratio_complex(n: usize, z: Complex64) -> Complex64 {
    assert!(n >= 1);
    let mut r = 2.0 * z;
    for k in 2..=n {
        r = 2.0 * z - 2.0 * (k - 1) as f64 / r;
    }
    1.0 / r
}

/// Zeros of `H_n` (equivalently of `h_n`), ascending.
pub fn hermite_zeros(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let edge = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let samples = 200 * n + 400;
    let mut zeros = Vec::with_capacity(n);
    let f = |x: f64| hermite_function_pair(n, x).0;
    let mut xa = -edge;
    let mut fa = f(xa);
    for i in 1..=samples {
        let xb = -edge + 2.0 * edge * i as f64 / samples as f64;
        let fb = f(xb);
        if fa == 0.0 {
            zeros.push(xa);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (xa, xb, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        xa = xb;
        fa = fb;
    }
    zeros
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert_eq!(hermite_eval(0, 5.0).unwrap(), (1.0, 0.0));
        assert_eq!(hermite_eval(2, 1.0).unwrap(), (2.0, 8.0));
        assert_eq!(hermite_eval(3, 0.5).unwrap(), (-5.0, -6.0));
    }

    #[test]
    fn order_guard_and_overflow() {
        assert!(matches!(
            hermite_eval(201, 0.1),
            Err(Error::HermiteOrder { .. })
        ));
        assert!(matches!(
            hermite_eval(200, 1e3),
            Err(Error::HermiteRange { .. })
        ));
    }

    #[test]
    fn functions_match_polynomials() {
        for n in [0usize, 1, 4, 9, 17] {
            for &x in &[-2.3, -0.4, 0.0, 0.7, 3.1] {
                let (hp, dp) = hermite_eval(n, x).unwrap();
                let w = (-0.5 * x * x).exp() / hermite_log_norm(n).exp();
                let (h, d) = hermite_function(n, x);
                assert!((h - hp * w).abs() < 1e-12 * (1.0 + h.abs()));
                assert!((d - (dp - x * hp) * w).abs() < 1e-11 * (1.0 + d.abs()));
            }
        }
    }

    #[test]
    fn zeros_count_and_symmetry() {
        for n in [1usize, 2, 7, 40] {
            let z = hermite_zeros(n);
            assert_eq!(z.len(), n);
            for (a, b) in z.iter().zip(z.iter().rev()) {
                assert!((a + b).abs() < 1e-12);
            }
        }
        assert!(hermite_zeros(1)[0].abs() < 1e-15);
    }

    #[test]
    fn ratio_recurrence() {
        let z = Complex64::new(0.3, 0.8);
        let n = 6;
        let (h6, _) = hermite_function_complex(6, z);
        let (h5, _) = hermite_function_complex(5, z);
        // H_5/H_6 = (h5/h6) * sqrt(1/(2*6))
        let expect = h5 / h6 / (2.0 * n as f64).sqrt();
        assert!((hermite_ratio_complex(n, z) - expect).norm() < 1e-12);
    }
}
