//! Wavefunction assembly from the region fields:
//! `ψ = A e^{-Y/ħ}` in I and III, `ψ = A sin(X/ħ + π/4)/sqrt(X')` in II.

use serde::{Deserialize, Serialize};

use super::ActionField;
use crate::error::{Error, Result};
use crate::model::Region;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wavefunction {
    pub grid: Vec<f64>,
    pub psi: Vec<f64>,
    /// `[A_I, A_II, A_III]` after normalization.
    pub amplitudes: [f64; 3],
}

impl Wavefunction {
    /// Sign changes of `ψ` strictly inside `(a, b)`.
    pub fn nodes_between(&self, a: f64, b: f64) -> usize {
        let vals: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.psi)
            .filter(|(x, _)| **x > a && **x < b)
            .map(|(_, p)| *p)
            .filter(|p| *p != 0.0)
            .collect();
        vals.windows(2)
            .filter(|w| (w[0] < 0.0) != (w[1] < 0.0))
            .count()
    }
}

/// Matching tolerance on the derivative jump, relative to the turning-point
/// wavenumber times the amplitude.
const MATCH_TOL: f64 = 1e-6;

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]))
        .sum()
}

/// Assembles and L²-normalizes `ψ` from fields on I, II and III that share
/// the turning points as endpoints.
pub fn wavefunction_from_action(
    left: &ActionField,
    mid: &ActionField,
    right: &ActionField,
) -> Result<Wavefunction> {
    let s = &mid.slice;
    if left.region != Region::I || mid.region != Region::II || right.region != Region::III {
        return Err(Error::Domain(
            "fields must cover regions I, II and III in order".into(),
        ));
    }
    let ends_ok = left.grid.last() == Some(&s.x1)
        && mid.grid.first() == Some(&s.x1)
        && mid.grid.last() == Some(&s.x2)
        && right.grid.first() == Some(&s.x2);
    if !ends_ok {
        return Err(Error::Domain(
            "fields must share the turning points as endpoints".into(),
        ));
    }
    let h = s.hbar();
    let q = std::f64::consts::FRAC_PI_4;
    let psi2 = |i: usize| (mid.real[i] / h + q).sin() / mid.real_d1[i].sqrt();
    let dpsi2 = |i: usize| {
        let t = mid.real[i] / h + q;
        let d1 = mid.real_d1[i];
        (t.cos() * d1 / h - t.sin() * mid.real_d2[i] / (2.0 * d1)) / d1.sqrt()
    };
    let last = mid.len() - 1;
    let a1 = psi2(0) / (-left.imag[left.len() - 1] / h).exp();
    let a3 = psi2(last) / (-right.imag[0] / h).exp();

    // derivative continuity at both turning points
    for (x, d_mid, d_side, val) in [
        (
            s.x1,
            dpsi2(0),
            -a1 * left.imag_d1[left.len() - 1] / h,
            psi2(0),
        ),
        (s.x2, dpsi2(last), -a3 * right.imag_d1[0] / h, psi2(last)),
    ] {
        let scale = s.turning_wavenumber(x) * val.abs() + d_mid.abs();
        let jump = (d_mid - d_side).abs() / scale;
        if !(jump <= MATCH_TOL) {
            return Err(Error::NonEigenvalue {
                x,
                discontinuity: jump,
            });
        }
    }

    let mut grid = Vec::with_capacity(left.len() + mid.len() + right.len());
    let mut psi = Vec::with_capacity(grid.capacity());
    for i in 0..left.len() - 1 {
        grid.push(left.grid[i]);
        psi.push(a1 * (-left.imag[i] / h).exp());
    }
    for i in 0..mid.len() {
        grid.push(mid.grid[i]);
        psi.push(psi2(i));
    }
    for i in 1..right.len() {
        grid.push(right.grid[i]);
        psi.push(a3 * (-right.imag[i] / h).exp());
    }
    let sq: Vec<f64> = psi.iter().map(|p| p * p).collect();
    let norm = trapezoid(&grid, &sq).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Domain("wavefunction cannot be normalized".into()));
    }
    for p in psi.iter_mut() {
        *p /= norm;
    }
    Ok(Wavefunction {
        grid,
        psi,
        amplitudes: [a1 / norm, 1.0 / norm, a3 / norm],
    })
}
