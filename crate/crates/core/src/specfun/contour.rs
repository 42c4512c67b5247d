//! Closed contours in the complex plane and contour quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourKind {
    Rectangle,
    Ellipse,
}

/// Axis-aligned rectangle or ellipse centred on the real axis, traversed
/// counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub kind: ContourKind,
    pub center: f64,
    pub half_width: f64,
    pub half_height: f64,
    pub samples: usize,
}

pub const MIN_CONTOUR_SAMPLES: usize = 64;
const MAX_CONTOUR_SAMPLES: usize = 1 << 22;
const CONTOUR_TOL: f64 = 1e-12;
const PANEL: usize = 16;

impl Contour {
    pub fn new(
        kind: ContourKind,
        center: f64,
        half_width: f64,
        half_height: f64,
        samples: usize,
    ) -> Result<Self> {
        if !(half_width > 0.0 && half_height > 0.0) || !center.is_finite() {
            return Err(Error::InvalidContour(format!(
                "half-width {half_width} and half-height {half_height} must be positive"
            )));
        }
        if samples < MIN_CONTOUR_SAMPLES || !samples.is_multiple_of(2) {
            return Err(Error::InvalidContour(format!(
                "sample count {samples} must be even and at least {MIN_CONTOUR_SAMPLES}"
            )));
        }
        Ok(Self {
            kind,
            center,
            half_width,
            half_height,
            samples,
        })
    }

    /// Contour enclosing `[a, b]` with a real-axis margin and the given
    /// imaginary half-height.
    pub fn enclosing(
        kind: ContourKind,
        a: f64,
        b: f64,
        margin: f64,
        half_height: f64,
    ) -> Result<Self> {
        if !(a < b) || !(margin > 0.0) {
            return Err(Error::InvalidContour(format!(
                "cannot enclose [{a}, {b}] with margin {margin}"
            )));
        }
        let c = Self::new(
            kind,
            0.5 * (a + b),
            0.5 * (b - a) + margin,
            half_height,
            256,
        )?;
        debug_assert!(c.encloses(a, b));
        Ok(c)
    }

    /// Whether both ends of the real segment `[a, b]` lie strictly inside.
    pub fn encloses(&self, a: f64, b: f64) -> bool {
        let lo = self.center - self.half_width;
        let hi = self.center + self.half_width;
        a > lo && b < hi
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn ellipse_sum<F: Fn(Complex64) -> Complex64>(p: &F, c: &Contour, n: usize) -> Complex64 {
    let dt = std::f64::consts::TAU / n as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let t = k as f64 * dt;
        let z = Complex64::new(c.center + c.half_width * t.cos(), c.half_height * t.sin());
        let dz = Complex64::new(-c.half_width * t.sin(), c.half_height * t.cos());
        s += p(z) * dz;
    }
    s * dt
}

fn segment<F: Fn(Complex64) -> Complex64>(
    p: &F,
    a: Complex64,
    b: Complex64,
    panels: usize,
    gl: &(Vec<f64>, Vec<f64>),
) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    let step = (b - a) / panels as f64;
    for j in 0..panels {
        let pa = a + step * j as f64;
        let mid = pa + 0.5 * step;
        for (xi, wi) in gl.0.iter().zip(&gl.1) {
            s += p(mid + 0.5 * step * *xi) * *wi;
        }
    }
    s * 0.5 * step
}

fn rectangle_sum<F: Fn(Complex64) -> Complex64>(
    p: &F,
    c: &Contour,
    n: usize,
    gl: &(Vec<f64>, Vec<f64>),
) -> Complex64 {
    let panels = (n / (4 * PANEL)).max(1);
    let (l, r) = (c.center - c.half_width, c.center + c.half_width);
    let h = c.half_height;
    let corners = [
        Complex64::new(l, -h),
        Complex64::new(r, -h),
        Complex64::new(r, h),
        Complex64::new(l, h),
    ];
    (0..4)
        .map(|i| segment(p, corners[i], corners[(i + 1) % 4], panels, gl))
        .sum()
}

/// `∮ p(z) dz` counter-clockwise around `c`.
///
/// Ellipses use the periodic trapezoid rule; rectangles use composite
/// Gauss-Legendre panels on each side (the trapezoid rule loses its
/// spectral accuracy at the corners). The sample count is doubled until two
/// successive estimates agree.
pub fn contour_integral<F: Fn(Complex64) -> Complex64>(p: F, c: &Contour) -> Result<Complex64> {
    let gl = gauss_legendre(PANEL);
    let eval = |n: usize| match c.kind {
        ContourKind::Ellipse => ellipse_sum(&p, c, n),
        ContourKind::Rectangle => rectangle_sum(&p, c, n, &gl),
    };
    let mut n = c.samples;
    let mut prev = eval(n);
    loop {
        n *= 2;
        let cur = eval(n);
        if !cur.re.is_finite() || !cur.im.is_finite() {
            return Err(Error::Contour {
                samples: n,
                change: f64::INFINITY,
            });
        }
        let change = (cur - prev).norm();
        if change <= CONTOUR_TOL * cur.norm().max(1.0) {
            return Ok(cur);
        }
        if n >= MAX_CONTOUR_SAMPLES {
            return Err(Error::Contour { samples: n, change });
        }
        prev = cur;
    }
}
