//! Numerical integration of the split quantum Hamilton-Jacobi equations.

use super::companion::{decaying_log_derivative, far_point, oracle_seed, CompanionFamily};
use super::{check_increasing, merge_points, ActionField, CauchySeed};
use crate::error::{Error, Result};
use crate::model::{EnergySlice, Region};
use crate::ode::{Dop853, OdeError};

/// Tolerances of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

impl SolverOptions {
    fn solver(&self) -> Dop853 {
        Dop853::with_tolerances(self.rtol, self.atol)
    }
}

const SEED_TOL: f64 = 1e-8;

/// `X'''` from `4X'^4 - 3ħ²X''² + 2ħ²X'X''' = 8m(E - V)X'²`.
fn third(slice: &EnergySlice, x: f64, d1: f64, d2: f64) -> f64 {
    let h2 = slice.hbar() * slice.hbar();
    let k = -8.0 * slice.mass() * slice.excess(x);
    (k * d1 * d1 - 4.0 * d1.powi(4) + 3.0 * h2 * d2 * d2) / (2.0 * h2 * d1)
}

/// Relative residual of the third-order equation for given Cauchy data.
pub(crate) fn seed_residual(slice: &EnergySlice, seed: &CauchySeed) -> Option<f64> {
    let d3 = seed.d3?;
    let h2 = slice.hbar() * slice.hbar();
    let lhs = (4.0 * seed.d1.powi(4) - 3.0 * h2 * seed.d2 * seed.d2 + 2.0 * h2 * seed.d1 * d3)
        / (4.0 * seed.d1 * seed.d1);
    let rhs = -2.0 * slice.mass() * slice.excess(seed.x);
    let depth = 2.0 * slice.mass() * (slice.energy - slice.model.min_potential().1);
    Some((lhs - rhs).abs() / depth)
}

/// Companion-oracle seed at the midpoint of the classical region.
pub fn default_seed(slice: &EnergySlice) -> Result<CauchySeed> {
    oracle_seed(slice, slice.midpoint(), CompanionFamily::Pinned)
}

/// Seed at the midpoint with `X' = p_C`, `X'' = p_C'` and `X'''` from the
/// equation. Independent of any Schrödinger solution.
pub fn classical_seed(slice: &EnergySlice) -> Result<CauchySeed> {
    let x = slice.midpoint();
    let p = crate::classical::classical_momentum(slice, x);
    if !(p > 0.0) {
        return Err(Error::Domain(format!("no classical momentum at {x}")));
    }
    let d2 = -slice.mass() * slice.model.derivative(x) / p;
    Ok(CauchySeed {
        x,
        value: 0.0,
        d1: p,
        d2,
        d3: Some(third(slice, x, p, d2)),
        left_slope: None,
    })
}

fn check_region(slice: &EnergySlice, grid: &[f64], region: Region) -> Result<()> {
    if let Some(&x) = grid.iter().find(|&&x| {
        let r = slice.classify(x);
        let at_tp = x == slice.x1 || x == slice.x2;
        match region {
            Region::II => r != Region::II,
            _ => r != region && !at_tp,
        }
    }) {
        return Err(Error::Domain(format!("x = {x} outside region {region}")));
    }
    Ok(())
}

fn map_ode(e: OdeError, last: Option<f64>) -> Error {
    match (&e, last) {
        (OdeError::StepSizeUnderflow { x } | OdeError::NonFinite { x }, Some(d1))
            if !(d1 > 1e-8) =>
        {
            Error::VanishingSlope { x: *x }
        }
        _ => Error::Ode(e),
    }
}

/// Integrates the real-part equation from `x_s` to every point of `pts`
/// (ascending) with the state `[X, X', X'', ...extra]`.
fn integrate_from<const N: usize, F>(
    rhs: F,
    x_s: f64,
    y_s: [f64; N],
    pts: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let solver = opts.solver();
    let split = pts.partition_point(|&x| x < x_s);
    let left: Vec<f64> = pts[..split].iter().rev().copied().collect();
    let run = |outs: &[f64]| -> Result<Vec<[f64; N]>> {
        let last = std::cell::Cell::new(y_s[1]);
        let f = |x: f64, y: &[f64; N]| {
            last.set(y[1]);
            rhs(x, y)
        };
        solver
            .solve(f, x_s, y_s, outs)
            .map_err(|e| map_ode(e, Some(last.get())))
    };
    let mut lo = run(&left)?;
    lo.reverse();
    lo.extend(run(&pts[split..])?);
    for (x, y) in pts.iter().zip(&lo) {
        if !(y[1] > 0.0) || !y[1].is_finite() {
            return Err(Error::VanishingSlope { x: *x });
        }
    }
    Ok(lo)
}

/// `X, X', X''` on `grid` (inside `[x1, x2]`) from Cauchy data, with
/// `X(x1) = 0` and `Y = ħ log sqrt(X')`.
pub fn integrate_x(slice: &EnergySlice, seed: &CauchySeed, grid: &[f64]) -> Result<ActionField> {
    integrate_x_with(slice, seed, grid, &SolverOptions::default())
}

pub fn integrate_x_with(
    slice: &EnergySlice,
    seed: &CauchySeed,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<ActionField> {
    check_increasing(grid)?;
    check_region(slice, grid, Region::II)?;
    if slice.classify(seed.x) != Region::II || !(seed.d1 > 0.0) {
        return Err(Error::Seed {
            residual: f64::INFINITY,
            tolerance: SEED_TOL,
        });
    }
    if let Some(r) = seed_residual(slice, seed) {
        if !(r <= SEED_TOL) {
            return Err(Error::Seed {
                residual: r,
                tolerance: SEED_TOL,
            });
        }
    }
    let (pts, idx) = merge_points(grid, &[slice.x1]);
    let rhs = |x: f64, y: &[f64; 3]| [y[1], y[2], third(slice, x, y[1], y[2])];
    let states = integrate_from(rhs, seed.x, [seed.value, seed.d1, seed.d2], &pts, opts)?;
    let x0 = states[0][0];
    Ok(build_field(
        slice,
        grid,
        &idx,
        &states,
        x0,
        Some(*seed),
        None,
    ))
}

fn build_field<const N: usize>(
    slice: &EnergySlice,
    grid: &[f64],
    idx: &[usize],
    states: &[[f64; N]],
    x0: f64,
    seed: Option<CauchySeed>,
    xe: Option<Vec<f64>>,
) -> ActionField {
    let h = slice.hbar();
    let real_d1: Vec<f64> = idx.iter().map(|&i| states[i][1]).collect();
    let real_d2: Vec<f64> = idx.iter().map(|&i| states[i][2]).collect();
    ActionField {
        slice: slice.clone(),
        region: Region::II,
        grid: grid.to_vec(),
        real: idx.iter().map(|&i| states[i][0] - x0).collect(),
        imag: real_d1.iter().map(|d| 0.5 * h * d.ln()).collect(),
        imag_d1: real_d1
            .iter()
            .zip(&real_d2)
            .map(|(a, b)| 0.5 * h * b / a)
            .collect(),
        real_d1,
        real_d2,
        energy_derivative: xe,
        seed,
    }
}

/// `Y` in a forbidden region from the Riccati equation
/// `ħY'' = Y'² - 2m(V - E)`, integrated inward from a deep point.
pub fn integrate_y_forbidden(
    slice: &EnergySlice,
    region: Region,
    grid: &[f64],
) -> Result<ActionField> {
    check_increasing(grid)?;
    let far = far_point(slice, region)?;
    let margin = 0.05 * slice.width();
    let x_far = match region {
        Region::I => far.min(grid[0] - margin),
        Region::III => far.max(grid[grid.len() - 1] + margin),
        Region::II => {
            return Err(Error::Domain(
                "forbidden-region solver needs region I or III".into(),
            ))
        }
    };
    integrate_y_forbidden_from(slice, region, grid, x_far)
}

/// As [`integrate_y_forbidden`] with an explicit starting point `x_far`.
pub fn integrate_y_forbidden_from(
    slice: &EnergySlice,
    region: Region,
    grid: &[f64],
    x_far: f64,
) -> Result<ActionField> {
    check_increasing(grid)?;
    check_region(slice, grid, region)?;
    let (pts, idx) = match region {
        Region::I => merge_points(grid, &[slice.x1]),
        Region::III => merge_points(grid, &[slice.x2]),
        Region::II => {
            return Err(Error::Domain(
                "forbidden-region solver needs region I or III".into(),
            ))
        }
    };
    let states = riccati(slice, region, &pts, x_far)?;
    let tp = if region == Region::I {
        slice.x1
    } else {
        slice.x2
    };
    let itp = pts.binary_search_by(|p| p.total_cmp(&tp)).unwrap();
    let y0 = states[itp][0];
    let n = grid.len();
    Ok(ActionField {
        slice: slice.clone(),
        region,
        grid: grid.to_vec(),
        real: vec![0.0; n],
        real_d1: vec![0.0; n],
        real_d2: vec![0.0; n],
        imag: idx.iter().map(|&i| states[i][0] - y0).collect(),
        imag_d1: idx.iter().map(|&i| states[i][1]).collect(),
        energy_derivative: None,
        seed: None,
    })
}

/// Riccati integration from `x_far` to each point of ascending `pts`;
/// points may run past the turning point a short way into region II.
pub(crate) fn riccati(
    slice: &EnergySlice,
    region: Region,
    pts: &[f64],
    x_far: f64,
) -> Result<Vec<[f64; 2]>> {
    let vmin = slice.model.min_potential().1;
    let depth = slice.energy - vmin;
    let v_far = slice.model.potential(x_far) - vmin;
    let beyond = match region {
        Region::I => x_far < pts[0],
        _ => x_far > pts[pts.len() - 1],
    };
    if !(v_far >= 2.0 * depth) || !beyond {
        return Err(Error::DomainTooShort {
            v_far: v_far + vmin,
            two_e: 2.0 * depth + vmin,
        });
    }
    let h = slice.hbar();
    let m = slice.mass();
    let q0 = -h * decaying_log_derivative(slice, region, x_far);
    let rhs = |x: f64, y: &[f64; 2]| [y[1], (y[1] * y[1] - 2.0 * m * slice.excess(x)) / h];
    let solver = Dop853::with_tolerances(1e-12, 1e-14);
    match region {
        Region::I => Ok(solver.solve(rhs, x_far, [0.0, q0], pts)?),
        _ => {
            let rev: Vec<f64> = pts.iter().rev().copied().collect();
            let mut out = solver.solve(rhs, x_far, [0.0, q0], &rev)?;
            out.reverse();
            Ok(out)
        }
    }
}

/// Adds `∂X/∂E` to a classical-region field by integrating the variational
/// equation of the third-order equation alongside `X`.
///
/// The family of solutions is the one with fixed `X'(x1)`, so the seed for
/// `X_E', X_E''` comes from central differences of two runs at `E ± δ` with
/// the same left slope. `X_E(x1) = 0`.
pub fn integrate_xe(field: &ActionField, grid: &[f64]) -> Result<ActionField> {
    check_increasing(grid)?;
    let slice = &field.slice;
    check_region(slice, grid, Region::II)?;
    let seed = field.seed.ok_or(Error::Seed {
        residual: f64::INFINITY,
        tolerance: SEED_TOL,
    })?;
    let e = slice.energy;
    let delta = 1e-5 * e.abs().max(1e-300);
    // the family is fixed by X'(x1), which only companion seeds carry
    let family = CompanionFamily::LeftSlope(seed.left_slope.ok_or(Error::Seed {
        residual: f64::INFINITY,
        tolerance: SEED_TOL,
    })?);
    let probe = |de: f64| -> Result<(f64, f64)> {
        let s = slice.model.slice(e + de)?;
        let sd = oracle_seed(&s, s.midpoint(), family)?;
        let f = integrate_x(&s, &sd, &[seed.x])?;
        Ok((f.real_d1[0], f.real_d2[0]))
    };
    let (p1, p2) = probe(delta)?;
    let (m1, m2) = probe(-delta)?;
    let scale = seed.d1.abs() + slice.hbar() * seed.d2.abs() / seed.d1.abs();
    let mismatch = (0.5 * (p1 + m1) - seed.d1).abs()
        + slice.hbar() * (0.5 * (p2 + m2) - seed.d2).abs() / seed.d1;
    if !(mismatch <= 1e-6 * scale) {
        return Err(Error::Seed {
            residual: mismatch / scale,
            tolerance: 1e-6,
        });
    }
    let xe1 = (p1 - m1) / (2.0 * delta);
    let xe2 = (p2 - m2) / (2.0 * delta);

    let m = slice.mass();
    let h2 = slice.hbar() * slice.hbar();
    let rhs = |x: f64, y: &[f64; 6]| {
        let (d1, d2) = (y[1], y[2]);
        let d3 = third(slice, x, d1, d2);
        let k = -slice.excess(x);
        let dd1 = 4.0 * m * k / h2 - 6.0 * d1 * d1 / h2 - 1.5 * d2 * d2 / (d1 * d1);
        let dd2 = 3.0 * d2 / d1;
        let de = 4.0 * m * d1 / h2;
        [d1, d2, d3, y[4], y[5], de + dd1 * y[4] + dd2 * y[5]]
    };
    let (pts, idx) = merge_points(grid, &[slice.x1]);
    let y0 = [seed.value, seed.d1, seed.d2, 0.0, xe1, xe2];
    let states = integrate_from(rhs, seed.x, y0, &pts, &SolverOptions::default())?;
    let i1 = pts.binary_search_by(|p| p.total_cmp(&slice.x1)).unwrap();
    let xe: Vec<f64> = idx.iter().map(|&i| states[i][3] - states[i1][3]).collect();
    Ok(build_field(
        slice,
        grid,
        &idx,
        &states,
        states[i1][0],
        Some(seed),
        Some(xe),
    ))
}
