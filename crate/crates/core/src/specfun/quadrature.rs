//! Adaptive Gauss-Kronrod (7/15) quadrature for real and complex integrands.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn parts(&self) -> (f64, f64);
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn parts(&self) -> (f64, f64) {
        (*self, 0.0)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn parts(&self) -> (f64, f64) {
        (self.re, self.im)
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let err = ((kron - gauss) * h).magnitude();
    (kron * h, err)
}

struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Piece<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Piece<V> {}
impl<V> PartialOrd for Piece<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Piece<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadEstimate<V>> {
    if a == b {
        return Ok(QuadEstimate {
            value: V::zero(),
            error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Piece {
        a,
        b,
        value: v,
        error: e,
    });
    let mut total = v;
    let mut total_err = e;
    loop {
        if !total_err.is_finite() || !total.magnitude().is_finite() {
            let (re, im) = total.parts();
            return Err(Error::Quadrature {
                estimate_re: re,
                estimate_im: im,
                error_bound: total_err,
            });
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.magnitude()) {
            break;
        }
        if heap.len() >= opts.max_subdivisions {
            let (re, im) = total.parts();
            return Err(Error::Quadrature {
                estimate_re: re,
                estimate_im: im,
                error_bound: total_err,
            });
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a.min(worst.b) || m >= worst.a.max(worst.b) {
            // interval cannot be split further at double precision
            let (re, im) = total.parts();
            return Err(Error::Quadrature {
                estimate_re: re,
                estimate_im: im,
                error_bound: total_err,
            });
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Piece {
            a: worst.a,
            b: m,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            a: m,
            b: worst.b,
            value: v2,
            error: e2,
        });
        if heap.len() % 64 == 0 {
            // refresh the running sums to keep roundoff from accumulating
            total = heap.iter().fold(V::zero(), |s, p| s + p.value);
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().fold(V::zero(), |s, p| s + p.value);
    Ok(QuadEstimate {
        value,
        error: total_err,
        evaluations,
    })
}

/// Adaptive quadrature with absolute tolerance `tol`.
///
/// The integral is taken in the variable `θ` with
/// `x = (a+b)/2 - (b-a)/2 cos θ`, which removes square-root behaviour at
/// both endpoints (`sqrt(x - a)` becomes smooth in `θ`, and `1/sqrt(x - a)`
/// becomes bounded) while leaving smooth integrands smooth.
pub fn adaptive_quadrature<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<V> {
    adaptive_quadrature_offsets(|x, _, _| f(x), a, b, tol)
}

/// As [`adaptive_quadrature`], but `f` also receives the distances
/// `x - a` and `b - x`, computed without cancellation. Integrands whose
/// singular factor depends on the distance to an endpoint should use them.
pub fn adaptive_quadrature_offsets<V: QuadValue, F: FnMut(f64, f64, f64) -> V>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<V> {
    let h = 0.5 * (b - a);
    let g = |t: f64| {
        let s = (0.5 * t).sin();
        let c = (0.5 * t).cos();
        let da = 2.0 * h * s * s;
        let db = 2.0 * h * c * c;
        let x = if da <= db { a + da } else { b - db };
        f(x, da, db) * (h * t.sin())
    };
    let opts = QuadOptions {
        abs_tol: tol,
        rel_tol: 0.0,
        ..QuadOptions::default()
    };
    Ok(integrate(g, 0.0, std::f64::consts::PI, opts)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::dawson;

    #[test]
    fn polynomial_and_half_disk() {
        let v: f64 = adaptive_quadrature(|x| x, 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        let v: f64 =
            adaptive_quadrature(|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        let v: f64 =
            adaptive_quadrature(|x: f64| 1.0 / (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-12).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn gaussian_exponential_vs_dawson() {
        let v: f64 = adaptive_quadrature(|x: f64| (x * x).exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - dawson(1.0) * 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn complex_integrand() {
        let v: Complex64 = adaptive_quadrature(
            |x| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            1e-12,
        )
        .unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn failure_carries_estimate() {
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_subdivisions: 4,
        };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, opts);
        match r {
            Err(Error::Quadrature {
                estimate_re,
                error_bound,
                ..
            }) => {
                assert!(estimate_re.is_finite());
                assert!(error_bound > 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
