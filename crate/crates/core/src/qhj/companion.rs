//! Companion-solution oracle: `X` and `Y` from a complex Schrödinger
//! solution `ψ + iφ` built from two real solutions.
//!
//! `u` decays into region I and is normalized to `u(x1) = 1`; `v` has
//! `v(x1) = 0, v'(x1) = 1`. With `ρ > 0`,
//! `ψ = sqrt(ρ/ħ) u` and `φ = (v - ρ u) / (ħ sqrt(ρ/ħ))` have Wronskian `1/ħ`,
//! so `X' = 1/(ψ² + φ²)` and `Y = -ħ log|ψ + iφ| = ħ log sqrt(X')` exactly.
//! The phase starts at `-π/4` in `x1`; `ρ` selects the member of the family.

use serde::{Deserialize, Serialize};

use super::{check_increasing, merge_points, phase_points, unwrap_phase, ActionField, CauchySeed};
use crate::classical::classical_forbidden_action;
use crate::error::{Error, Result};
use crate::model::{EnergySlice, Region};
use crate::ode::Dop853;

/// Member of the companion family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CompanionFamily {
    /// Phase `π/4 (mod π)` at `x2` as well as `-π/4` at `x1`. At an eigenvalue
    /// this is the member whose real part is the eigenfunction. Falls back to
    /// the turning-point slope where no positive solution exists.
    Pinned,
    /// Prescribed `X'(x1)`.
    LeftSlope(f64),
}

const WRONSKIAN_TOL: f64 = 1e-9;
/// Forbidden-region depth of the starting point, in units of ħ.
const FAR_ACTION: f64 = 18.0;

fn schrodinger(slice: &EnergySlice) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
    let h = slice.hbar();
    let c = 2.0 * slice.mass() / (h * h);
    move |x, y| [y[1], c * slice.excess(x) * y[0]]
}

pub(crate) fn schrodinger_solver() -> Dop853 {
    Dop853::with_tolerances(1e-12, 1e-15)
}

/// A point in the forbidden region on the given side (`Region::I` or
/// `Region::III`) where `V - V_min ≥ 4 (E - V_min)` and the forbidden action
/// from the turning point exceeds `18 ħ`.
pub fn far_point(slice: &EnergySlice, side: Region) -> Result<f64> {
    let (tp, dir) = match side {
        Region::I => (slice.x1, -1.0),
        Region::III => (slice.x2, 1.0),
        Region::II => {
            return Err(Error::Domain(
                "far point requires a forbidden region".into(),
            ))
        }
    };
    let vmin = slice.model.min_potential().1;
    let depth = slice.energy - vmin;
    let h = slice.hbar();
    let mut d = 0.05 * slice.width();
    for _ in 0..200 {
        let x = tp + dir * d;
        let v = slice.model.potential(x) - vmin;
        if v >= 4.0 * depth && classical_forbidden_action(slice, x)? >= FAR_ACTION * h {
            return Ok(x);
        }
        d *= 1.2;
    }
    Err(Error::Domain(
        "could not locate a deep forbidden-region point".into(),
    ))
}

/// Log-derivative of the solution decaying into the forbidden region on
/// `side`, first-order WKB.
pub(crate) fn decaying_log_derivative(slice: &EnergySlice, side: Region, x: f64) -> f64 {
    let m = slice.mass();
    let p2 = 2.0 * m * slice.excess(x);
    let p = p2.sqrt();
    let corr = m * slice.model.derivative(x) / (2.0 * p2);
    match side {
        Region::I => p / slice.hbar() - corr,
        _ => -p / slice.hbar() - corr,
    }
}

/// Solution decaying into region `side`, integrated from deep inside that
/// region to every point in `pts` (ascending for I, any order handled).
pub(crate) fn decaying_solution(
    slice: &EnergySlice,
    side: Region,
    pts: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let mut xf = far_point(slice, side)?;
    let margin = 0.05 * slice.width();
    match side {
        Region::I => xf = xf.min(pts[0] - margin),
        _ => xf = xf.max(pts[pts.len() - 1] + margin),
    }
    // the solution grows by about e^S towards the turning point; start at
    // unit size so it stays well above the absolute tolerance
    let s = classical_forbidden_action(slice, xf)? / slice.hbar();
    if s > 650.0 {
        return Err(Error::Domain(format!(
            "forbidden action {s} at the far point overflows"
        )));
    }
    let y0 = [1.0, decaying_log_derivative(slice, side, xf)];
    let solver = schrodinger_solver();
    match side {
        Region::I => Ok(solver.solve(schrodinger(slice), xf, y0, pts)?),
        _ => {
            let rev: Vec<f64> = pts.iter().rev().copied().collect();
            let mut out = solver.solve(schrodinger(slice), xf, y0, &rev)?;
            out.reverse();
            Ok(out)
        }
    }
}

/// Solution with Cauchy data `y0` at `x0`, sampled on ascending `pts`.
pub(crate) fn cauchy_solution(
    slice: &EnergySlice,
    x0: f64,
    y0: [f64; 2],
    pts: &[f64],
) -> Result<Vec<[f64; 2]>> {
    let solver = schrodinger_solver();
    let split = pts.partition_point(|&x| x < x0);
    let left: Vec<f64> = pts[..split].iter().rev().copied().collect();
    let mut lo = solver.solve(schrodinger(slice), x0, y0, &left)?;
    lo.reverse();
    let hi = solver.solve(schrodinger(slice), x0, y0, &pts[split..])?;
    lo.extend(hi);
    Ok(lo)
}

pub(crate) struct CompanionStates {
    pub pts: Vec<f64>,
    pub psi: Vec<[f64; 2]>,
    pub phi: Vec<[f64; 2]>,
    pub left_slope: f64,
    pub wronskian_drift: f64,
}

/// Turning-point slope scale `(2 m ħ |V'(x)|)^{1/3}`.
pub(crate) fn turning_slope(slice: &EnergySlice, x: f64) -> f64 {
    (2.0 * slice.mass() * slice.hbar() * slice.model.derivative(x).abs()).cbrt()
}

pub(crate) fn companion_states(
    slice: &EnergySlice,
    grid: &[f64],
    family: CompanionFamily,
) -> Result<CompanionStates> {
    let (pts, _) = merge_points(grid, &phase_points(slice));
    let i1 = pts.binary_search_by(|p| p.total_cmp(&slice.x1)).unwrap();
    let i2 = pts.binary_search_by(|p| p.total_cmp(&slice.x2)).unwrap();
    let mut u = decaying_solution(slice, Region::I, &pts)?;
    let u1 = u[i1][0];
    if !(u1.is_finite() && u1 != 0.0) {
        return Err(Error::Domain(
            "decaying solution vanishes at the turning point".into(),
        ));
    }
    for s in u.iter_mut() {
        s[0] /= u1;
        s[1] /= u1;
    }
    let v = cauchy_solution(slice, slice.x1, [0.0, 1.0], &pts)?;
    let h = slice.hbar();
    let scale = turning_slope(slice, slice.x1);
    let left_slope = match family {
        CompanionFamily::LeftSlope(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Domain(format!("left slope {s} must be positive")));
            }
            s
        }
        CompanionFamily::Pinned => {
            let r2 = v[i2][0] / u[i2][0];
            let s = h / r2;
            if s.is_finite() && s > 1e-3 * scale && s < 1e3 * scale {
                s
            } else {
                scale
            }
        }
    };
    let rho = h / (2.0 * left_slope);
    let a = (rho / h).sqrt();
    let b = 1.0 / (h * a);
    let mut psi = Vec::with_capacity(pts.len());
    let mut phi = Vec::with_capacity(pts.len());
    let mut drift: f64 = 0.0;
    for (uu, vv) in u.iter().zip(&v) {
        let p = [a * uu[0], a * uu[1]];
        let q = [b * (vv[0] - rho * uu[0]), b * (vv[1] - rho * uu[1])];
        drift = drift.max((h * (p[0] * q[1] - p[1] * q[0]) - 1.0).abs());
        psi.push(p);
        phi.push(q);
    }
    Ok(CompanionStates {
        pts,
        psi,
        phi,
        left_slope,
        wronskian_drift: drift,
    })
}

fn derivatives(slice: &EnergySlice, x: f64, p: &[f64; 2], q: &[f64; 2]) -> (f64, f64, f64) {
    let h = slice.hbar();
    let k2 = 2.0 * slice.mass() * slice.excess(x) / (h * h);
    let r = p[0] * p[0] + q[0] * q[0];
    let s = p[0] * p[1] + q[0] * q[1];
    let ds = p[1] * p[1] + q[1] * q[1] + k2 * r;
    let d1 = 1.0 / r;
    let d2 = -2.0 * s / (r * r);
    let d3 = -2.0 * ds / (r * r) + 8.0 * s * s / (r * r * r);
    (d1, d2, d3)
}

/// Companion oracle on `grid` with the default (pinned) family.
pub fn companion_oracle(slice: &EnergySlice, grid: &[f64]) -> Result<ActionField> {
    companion_oracle_with(slice, grid, CompanionFamily::Pinned)
}

pub fn companion_oracle_with(
    slice: &EnergySlice,
    grid: &[f64],
    family: CompanionFamily,
) -> Result<ActionField> {
    check_increasing(grid)?;
    let st = companion_states(slice, grid, family)?;
    if st.wronskian_drift > WRONSKIAN_TOL {
        return Err(Error::WronskianDrift {
            drift: st.wronskian_drift,
        });
    }
    let h = slice.hbar();
    let n = st.pts.len();
    let mut wrapped = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        let (p, q) = (&st.psi[i], &st.phi[i]);
        wrapped.push(q[0].atan2(p[0]));
        let (a, b, _) = derivatives(slice, st.pts[i], p, q);
        d1.push(a);
        d2.push(b);
    }
    let rate: Vec<f64> = d1.iter().map(|d| d / h).collect();
    let theta = unwrap_phase(&st.pts, &wrapped, &rate, std::f64::consts::TAU)?;
    let i1 = st.pts.binary_search_by(|p| p.total_cmp(&slice.x1)).unwrap();
    let t1 = theta[i1];
    let (_, idx) = merge_points(grid, &phase_points(slice));
    let real: Vec<f64> = idx.iter().map(|&i| h * (theta[i] - t1)).collect();
    let real_d1: Vec<f64> = idx.iter().map(|&i| d1[i]).collect();
    let real_d2: Vec<f64> = idx.iter().map(|&i| d2[i]).collect();
    let imag: Vec<f64> = real_d1.iter().map(|d| 0.5 * h * d.ln()).collect();
    let imag_d1: Vec<f64> = real_d1
        .iter()
        .zip(&real_d2)
        .map(|(a, b)| 0.5 * h * b / a)
        .collect();
    let region = if grid.iter().all(|&x| slice.classify(x) == Region::II) {
        Region::II
    } else {
        slice.classify(grid[grid.len() / 2])
    };
    Ok(ActionField {
        slice: slice.clone(),
        region,
        grid: grid.to_vec(),
        real,
        real_d1,
        real_d2,
        imag,
        imag_d1,
        energy_derivative: None,
        seed: Some(oracle_seed_from(slice, &st, slice.midpoint())?),
    })
}

fn oracle_seed_from(slice: &EnergySlice, st: &CompanionStates, x: f64) -> Result<CauchySeed> {
    // integrate the pair to x from the nearest sample
    let i = st.pts.partition_point(|&p| p < x).min(st.pts.len() - 1);
    let solver = schrodinger_solver();
    let p = solver.solve(schrodinger(slice), st.pts[i], st.psi[i], &[x])?[0];
    let q = solver.solve(schrodinger(slice), st.pts[i], st.phi[i], &[x])?[0];
    let (d1, d2, d3) = derivatives(slice, x, &p, &q);
    Ok(CauchySeed {
        x,
        value: 0.0,
        d1,
        d2,
        d3: Some(d3),
        left_slope: Some(st.left_slope),
    })
}

/// Cauchy data `(X', X'', X''')` at `x` from the companion construction.
pub fn oracle_seed(slice: &EnergySlice, x: f64, family: CompanionFamily) -> Result<CauchySeed> {
    if slice.classify(x) != Region::II {
        return Err(Error::Domain(format!(
            "seed point {x} outside the classical region"
        )));
    }
    let st = companion_states(slice, &[x], family)?;
    let i = st.pts.binary_search_by(|p| p.total_cmp(&x)).unwrap();
    let (d1, d2, d3) = derivatives(slice, x, &st.psi[i], &st.phi[i]);
    Ok(CauchySeed {
        x,
        value: 0.0,
        d1,
        d2,
        d3: Some(d3),
        left_slope: Some(st.left_slope),
    })
}
