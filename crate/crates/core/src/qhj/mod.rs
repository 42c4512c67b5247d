//! Quantum Hamilton-Jacobi solvers.
//!
//! The abbreviated action is split as `W = X + iY`. In the classical region
//! `X` is the continuous phase and `Y = ħ log sqrt(X')`; in the forbidden
//! regions `X ≡ 0` and `ψ ∝ e^{-Y/ħ}` with `Y ≥ 0` growing away from the
//! turning point.

mod companion;
mod numeric;
mod oscillator;
mod residual;
mod wavefunction;

use serde::{Deserialize, Serialize};

pub(crate) use companion::decaying_solution;
pub use companion::{
    companion_oracle, companion_oracle_with, far_point, oracle_seed, CompanionFamily,
};
pub(crate) use numeric::riccati;
pub use numeric::{
    classical_seed, default_seed, integrate_x, integrate_x_with, integrate_xe,
    integrate_y_forbidden, integrate_y_forbidden_from, SolverOptions,
};
pub use oscillator::{
    general_solution_ho, special_action_ho, special_action_ho_complex, special_field_ho,
    special_momentum_ho, special_momentum_ho_complex, OscillatorState,
};
pub use residual::{fornberg_weights, qhje_residual, QhjeResidual};
pub use wavefunction::{wavefunction_from_action, Wavefunction};

use crate::error::{Error, Result};
use crate::model::{EnergySlice, Region};

/// Cauchy data for the third-order equation for `X` at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchySeed {
    pub x: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: Option<f64>,
    /// `X'(x1)` of the companion family the seed was taken from, if any.
    pub left_slope: Option<f64>,
}

/// Sampled real and imaginary parts of the abbreviated action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionField {
    pub slice: EnergySlice,
    pub region: Region,
    pub grid: Vec<f64>,
    /// `X`
    pub real: Vec<f64>,
    /// `X'`
    pub real_d1: Vec<f64>,
    /// `X''`
    pub real_d2: Vec<f64>,
    /// `Y`
    pub imag: Vec<f64>,
    /// `Y'`
    pub imag_d1: Vec<f64>,
    /// `∂X/∂E`
    pub energy_derivative: Option<Vec<f64>>,
    pub seed: Option<CauchySeed>,
}

impl ActionField {
    pub fn hbar(&self) -> f64 {
        self.slice.hbar()
    }

    pub fn energy(&self) -> f64 {
        self.slice.energy
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Complex momentum `X' + iY'`.
    pub fn momentum(&self) -> MomentumSeries {
        MomentumSeries {
            grid: self.grid.clone(),
            re: self.real_d1.clone(),
            im: self.imag_d1.clone(),
            provenance: Provenance::General,
        }
    }

    /// `max |Y - ħ log sqrt(X')|` over the samples.
    pub fn log_slope_identity_error(&self) -> f64 {
        let h = self.hbar();
        self.imag
            .iter()
            .zip(&self.real_d1)
            .map(|(y, d)| (y - 0.5 * h * d.ln()).abs())
            .fold(0.0, f64::max)
    }

    /// Classical field `X = W_C`, `Y = 0` on region II, for comparison
    /// with the quantum fields.
    pub fn classical(slice: &EnergySlice, grid: &[f64]) -> Result<ActionField> {
        check_increasing(grid)?;
        if let Some(&x) = grid.iter().find(|&&x| slice.classify(x) != Region::II) {
            return Err(Error::Domain(format!(
                "x = {x} outside the classical region"
            )));
        }
        let m = slice.mass();
        let mut real = Vec::with_capacity(grid.len());
        let mut real_d1 = Vec::with_capacity(grid.len());
        let mut real_d2 = Vec::with_capacity(grid.len());
        for &x in grid {
            let p = crate::classical::classical_momentum(slice, x);
            real.push(crate::classical::classical_action(slice, x)?);
            real_d1.push(p);
            real_d2.push(-m * slice.model.derivative(x) / p);
        }
        let n = grid.len();
        Ok(ActionField {
            slice: slice.clone(),
            region: Region::II,
            grid: grid.to_vec(),
            real,
            real_d1,
            real_d2,
            imag: vec![0.0; n],
            imag_d1: vec![0.0; n],
            energy_derivative: None,
            seed: None,
        })
    }

    /// Field restricted to the samples with index in `range`.
    pub fn slice_range(&self, range: std::ops::Range<usize>) -> ActionField {
        ActionField {
            slice: self.slice.clone(),
            region: self.region,
            grid: self.grid[range.clone()].to_vec(),
            real: self.real[range.clone()].to_vec(),
            real_d1: self.real_d1[range.clone()].to_vec(),
            real_d2: self.real_d2[range.clone()].to_vec(),
            imag: self.imag[range.clone()].to_vec(),
            imag_d1: self.imag_d1[range.clone()].to_vec(),
            energy_derivative: self
                .energy_derivative
                .as_ref()
                .map(|v| v[range.clone()].to_vec()),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Special,
    General,
    Classical,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Special => "special",
            Provenance::General => "general",
            Provenance::Classical => "classical",
        })
    }
}

/// Sampled complex quantum momentum `p = W'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSeries {
    pub grid: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub provenance: Provenance,
}

impl MomentumSeries {
    /// Classical momentum `p_C` on region II (imaginary magnitude outside).
    pub fn classical(slice: &EnergySlice, grid: &[f64]) -> Self {
        let mut re = Vec::with_capacity(grid.len());
        let mut im = Vec::with_capacity(grid.len());
        for &x in grid {
            let p = crate::classical::classical_momentum(slice, x);
            if slice.classify(x) == Region::II {
                re.push(p);
                im.push(0.0);
            } else {
                re.push(0.0);
                im.push(p);
            }
        }
        Self {
            grid: grid.to_vec(),
            re,
            im,
            provenance: Provenance::Classical,
        }
    }
}

pub(crate) fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Sorted union of `grid` and `extra`, with the position of every grid
/// sample in the union.
pub(crate) fn merge_points(grid: &[f64], extra: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut pts: Vec<f64> = grid.iter().chain(extra).copied().collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let idx = grid
        .iter()
        .map(|x| pts.binary_search_by(|p| p.total_cmp(x)).unwrap())
        .collect();
    (pts, idx)
}

/// Turning points plus a uniform set of points across region II dense
/// enough that the phase advances by well under π/2 between neighbours.
pub(crate) fn phase_points(slice: &EnergySlice) -> Vec<f64> {
    let w = crate::classical::classical_action(slice, slice.x2).unwrap_or(0.0) / slice.hbar();
    let k = 64 + (32.0 * w).ceil() as usize;
    let mut pts = crate::linspace(slice.x1, slice.x2, k);
    pts[0] = slice.x1;
    pts[k - 1] = slice.x2;
    pts
}

/// Continuous phase from wrapped angles.
///
/// `rate[i]` is the phase derivative at `pts[i]`; the trapezoid estimate of
/// each step selects the branch, and a predicted step above π/2 is rejected.
pub(crate) fn unwrap_phase(
    pts: &[f64],
    wrapped: &[f64],
    rate: &[f64],
    period: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(pts.len());
    if pts.is_empty() {
        return Ok(out);
    }
    out.push(wrapped[0]);
    for i in 1..pts.len() {
        let predicted = 0.5 * (rate[i] + rate[i - 1]) * (pts[i] - pts[i - 1]);
        if !(predicted.abs() <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::GridTooCoarse {
                x: pts[i],
                step: predicted,
            });
        }
        let raw = wrapped[i] - wrapped[i - 1];
        let k = ((predicted - raw) / period).round();
        out.push(out[i - 1] + raw + k * period);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_positions() {
        let (p, idx) = merge_points(&[0.0, 1.0, 2.0], &[0.5, 1.0, -1.0]);
        assert_eq!(p, vec![-1.0, 0.0, 0.5, 1.0, 2.0]);
        assert_eq!(idx, vec![1, 3, 4]);
    }

    #[test]
    fn unwrap_linear_phase() {
        let pts: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let true_phase: Vec<f64> = pts.iter().map(|x| 3.0 * x).collect();
        let wrapped: Vec<f64> = true_phase.iter().map(|t| t.sin().atan2(t.cos())).collect();
        let rate = vec![3.0; 100];
        let u = unwrap_phase(&pts, &wrapped, &rate, std::f64::consts::TAU).unwrap();
        for (a, b) in u.iter().zip(&true_phase) {
            assert!((a - b).abs() < 1e-12);
        }
        let fast = vec![30.0; 100];
        assert!(matches!(
            unwrap_phase(&pts, &wrapped, &fast, std::f64::consts::TAU),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
