//! Eigenvalues by matching the quantum-action representations at the
//! turning points, with a Schrödinger shooting oracle and the contour
//! quantization check for the oscillator.
//!
//! In region II every real solution is `sin(X/ħ + c)/sqrt(X')` for one
//! solution `X` of the third-order equation. Writing the log-derivative of a
//! region I or III solution in the same form fixes a Prüfer angle at each
//! end; the energy is an eigenvalue when the angles differ by a multiple of
//! π, and the mismatch is the sine of that difference.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnergySlice, PotentialModel, Region};
use crate::qhj::{
    classical_seed, decaying_solution, integrate_x, riccati, special_momentum_ho_complex,
    OscillatorState,
};
use crate::specfun::{contour_integral, Contour, ContourKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Matching,
    ShootingOracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Matching => "matching",
            Method::ShootingOracle => "shooting-oracle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub n: usize,
    pub energy: f64,
    pub mismatch: f64,
    pub iterations: usize,
    pub method: Method,
}

/// Mismatch details at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matching {
    /// `sin(Φ)`; zero at eigenvalues.
    pub mismatch: f64,
    /// Accumulated Prüfer angle `Φ` across the classical region.
    pub angle: f64,
}

/// Angle `θ ∈ (0, π)` with `X'/ħ cot θ - X''/(2X') = l`.
fn prufer_angle(l: f64, d1: f64, d2: f64, h: f64) -> f64 {
    let cot = (l + d2 / (2.0 * d1)) * h / d1;
    std::f64::consts::FRAC_PI_2 - cot.atan()
}

/// Matching data at energy `e`: both forbidden-region fields run to the
/// offset points `x1 + ε`, `x2 - ε`, where they meet the region II field.
pub fn matching(model: &PotentialModel, e: f64) -> Result<Matching> {
    let s = model.slice(e)?;
    let eps = s.matching_offset();
    let (a, b) = (s.x1 + eps, s.x2 - eps);
    let h = s.hbar();
    let left = riccati(&s, Region::I, &[a], far(&s, Region::I)?)?[0];
    let right = riccati(&s, Region::III, &[b], far(&s, Region::III)?)?[0];
    let seed = classical_seed(&s)?;
    let f = integrate_x(&s, &seed, &[a, b])?;
    // region I and III solutions are e^{-Y/ħ}, so ψ'/ψ = -Y'/ħ
    let t1 = prufer_angle(-left[1] / h, f.real_d1[0], f.real_d2[0], h);
    let t2 = prufer_angle(-right[1] / h, f.real_d1[1], f.real_d2[1], h);
    let angle = t1 + (f.real[1] - f.real[0]) / h - t2;
    Ok(Matching {
        mismatch: angle.sin(),
        angle,
    })
}

fn far(s: &EnergySlice, side: Region) -> Result<f64> {
    let x = crate::qhj::far_point(s, side)?;
    let m = 0.05 * s.width();
    Ok(match side {
        Region::I => x.min(s.x1 - m),
        _ => x.max(s.x2 + m),
    })
}

/// Signed matching residual at `e` (dimensionless, in `[-1, 1]`).
pub fn match_mismatch(model: &PotentialModel, e: f64) -> Result<f64> {
    Ok(matching(model, e)?.mismatch)
}

/// Root of `f` in `[lo, hi]` by bisection down to a small bracket, then
/// Illinois-modified secant steps that keep the bracket.
fn solve_bracketed<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64, usize)> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok((a, 0.0, 0));
    }
    if fb == 0.0 {
        return Ok((b, 0.0, 0));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let tol = |x: f64| 1e-10 * x.abs().max(1.0);
    let mut it = 0;
    while b - a > 1e-4 * a.abs().max(1.0) && it < 100 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        it += 1;
        if fm == 0.0 {
            return Ok((m, 0.0, it));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let mut side = 0i8;
    while it < 300 {
        let x = (a * fb - b * fa) / (fb - fa);
        let x = if x > a && x < b { x } else { 0.5 * (a + b) };
        let fx = f(x)?;
        it += 1;
        if fx == 0.0 {
            return Ok((x, 0.0, it));
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if b - a <= tol(x) || (x - a).min(b - x) <= 0.25 * tol(x) {
            let best = if fa.abs() < fb.abs() { a } else { b };
            let fbest = f(best)?;
            return Ok((best, fbest, it + 1));
        }
    }
    Err(Error::NotConverged(format!(
        "no root to tolerance in [{lo}, {hi}]"
    )))
}

/// Eigenvalue in `bracket` by turning-point matching.
pub fn find_eigenvalue(model: &PotentialModel, bracket: (f64, f64)) -> Result<EigenResult> {
    let (e, _, iterations) = solve_bracketed(|e| match_mismatch(model, e), bracket.0, bracket.1)?;
    let m = matching(model, e)?;
    let n = (m.angle / std::f64::consts::PI).round().max(0.0) as usize;
    Ok(EigenResult {
        n,
        energy: e,
        mismatch: m.mismatch.abs(),
        iterations,
        method: Method::Matching,
    })
}

/// Sign changes of the matching residual on `points` equally spaced
/// energies in `[lo, hi]`.
pub fn scan_brackets(
    model: &PotentialModel,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    let vmin = model.min_potential().1;
    if !(hi > lo) || !(hi > vmin) {
        return Err(Error::Domain(format!("empty energy range [{lo}, {hi}]")));
    }
    let lo = if lo > vmin {
        lo
    } else {
        vmin + 1e-6 * (hi - vmin)
    };
    let es = crate::linspace(lo, hi, points.max(2));
    let vals: Vec<f64> = es
        .par_iter()
        .map(|&e| match_mismatch(model, e))
        .collect::<Result<_>>()?;
    Ok((1..es.len())
        .filter(|&i| vals[i - 1].signum() != vals[i].signum())
        .map(|i| (es[i - 1], es[i]))
        .collect())
}

/// Eigenvalues for every bracket, in parallel.
pub fn find_eigenvalues(
    model: &PotentialModel,
    brackets: &[(f64, f64)],
    method: Method,
) -> Result<Vec<EigenResult>> {
    brackets
        .par_iter()
        .map(|&b| match method {
            Method::Matching => find_eigenvalue(model, b),
            Method::ShootingOracle => shooting_oracle(model, b),
        })
        .collect()
}

/// Normalized Wronskian of the two decaying solutions at the potential
/// minimum, and the node count of the left solution on `[x1, x2]`.
fn shooting_wronskian(model: &PotentialModel, e: f64, count: bool) -> Result<(f64, usize)> {
    let s = model.slice(e)?;
    let x0 = model.min_potential().0.clamp(s.x1, s.x2);
    let k = s.turning_wavenumber(s.x1).max(s.turning_wavenumber(s.x2));
    let pts = if count {
        let mut p = crate::qhj::phase_points(&s);
        p.push(x0);
        p.sort_by(f64::total_cmp);
        p.dedup();
        p
    } else {
        vec![x0]
    };
    let l = decaying_solution(&s, Region::I, &pts)?;
    let r = decaying_solution(&s, Region::III, &[x0])?[0];
    let i0 = pts.binary_search_by(|p| p.total_cmp(&x0)).unwrap();
    let a = l[i0];
    let na = (a[0] * a[0] + a[1] * a[1] / (k * k)).sqrt();
    let nb = (r[0] * r[0] + r[1] * r[1] / (k * k)).sqrt();
    let w = (a[0] * r[1] - a[1] * r[0]) / (k * na * nb);
    let nodes = if count {
        let vals: Vec<f64> = l.iter().map(|y| y[0]).filter(|v| *v != 0.0).collect();
        vals.windows(2)
            .filter(|p| (p[0] < 0.0) != (p[1] < 0.0))
            .count()
    } else {
        0
    };
    Ok((w, nodes))
}

/// Eigenvalue in `bracket` by shooting the Schrödinger equation from both
/// forbidden regions to the potential minimum.
pub fn shooting_oracle(model: &PotentialModel, bracket: (f64, f64)) -> Result<EigenResult> {
    let (e, _, iterations) = solve_bracketed(
        |e| Ok(shooting_wronskian(model, e, false)?.0),
        bracket.0,
        bracket.1,
    )?;
    let (w, n) = shooting_wronskian(model, e, true)?;
    Ok(EigenResult {
        n,
        energy: e,
        mismatch: w.abs(),
        iterations,
        method: Method::ShootingOracle,
    })
}

/// `∮ p_S dz` for the oscillator state `n` around a rectangle enclosing the
/// turning points and all nodes. Equals `2πnħ`.
pub fn leacock_padgett_check(model: &PotentialModel, n: usize) -> Result<Complex64> {
    let st = OscillatorState::new(model, n)?;
    let s = st.slice()?;
    // h_n has only real zeros, so the height is free
    let c = Contour::enclosing(
        ContourKind::Rectangle,
        s.x1,
        s.x2,
        0.25 * s.width(),
        0.5 * s.width(),
    )?;
    contour_integral(
        |z| special_momentum_ho_complex(n, z, model).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        &c,
    )
}
