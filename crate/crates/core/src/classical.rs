//! Classical Hamilton-Jacobi reference quantities at fixed energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnergySlice, Potential, Region};
use crate::specfun::adaptive_quadrature_offsets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassicalKind {
    Momentum,
    Action,
    ForbiddenAction,
    EnergyDerivative,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSeries {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: ClassicalKind,
}

fn quad_tol(slice: &EnergySlice) -> f64 {
    let pmax = (2.0 * slice.mass() * (slice.energy - slice.model.min_potential().1)).sqrt();
    1e-14 * (1.0 + pmax * slice.width())
}

/// `sqrt(2m|E - V(x)|)`: the momentum in region II and the magnitude of the
/// imaginary momentum in regions I and III.
pub fn classical_momentum(slice: &EnergySlice, x: f64) -> f64 {
    (2.0 * slice.mass() * (slice.energy - slice.model.potential(x)).abs()).sqrt()
}

fn momentum_inside(slice: &EnergySlice, x: f64) -> f64 {
    (2.0 * slice.mass() * (slice.energy - slice.model.potential(x)))
        .max(0.0)
        .sqrt()
}

/// `|E - V|` on `[a, b]` at the point with offsets `da = x - a`, `db = b - x`,
/// expanded about whichever endpoint is a turning point.
fn kinetic(slice: &EnergySlice, a: f64, b: f64, x: f64, da: f64, db: f64) -> f64 {
    let tps = [slice.x1, slice.x2];
    let v = if tps.contains(&a) && da <= db {
        slice.excess_near(a, da)
    } else if tps.contains(&b) && db < da {
        slice.excess_near(b, -db)
    } else {
        slice.excess(x)
    };
    v.abs()
}

/// `∫_a^b g(|p_C|) dx` with accurate behaviour at turning-point endpoints.
fn integrate_momentum<G: Fn(f64) -> f64>(
    slice: &EnergySlice,
    a: f64,
    b: f64,
    g: G,
    tol: f64,
) -> Result<f64> {
    let two_m = 2.0 * slice.mass();
    adaptive_quadrature_offsets(
        |x, da, db| g((two_m * kinetic(slice, a, b, x, da, db)).sqrt()),
        a,
        b,
        tol,
    )
}

fn inverse(m: f64) -> impl Fn(f64) -> f64 {
    move |p| if p > 0.0 { m / p } else { 0.0 }
}

fn check_inside(slice: &EnergySlice, x: f64) -> Result<()> {
    if slice.classify(x) != Region::II {
        return Err(Error::Domain(format!(
            "x = {x} outside the classical region [{}, {}]",
            slice.x1, slice.x2
        )));
    }
    Ok(())
}

/// `W_C(x) = ∫_{x1}^{x} p_C dx`, zero at `x1`.
pub fn classical_action(slice: &EnergySlice, x: f64) -> Result<f64> {
    check_inside(slice, x)?;
    integrate_momentum(slice, slice.x1, x, |p| p, quad_tol(slice))
}

/// Magnitude of the imaginary classical action in a forbidden region,
/// measured from the adjacent turning point.
pub fn classical_forbidden_action(slice: &EnergySlice, x: f64) -> Result<f64> {
    let region = slice.classify(x);
    let tp = match region {
        Region::II => {
            if x == slice.x1 || x == slice.x2 {
                return Ok(0.0);
            }
            return Err(Error::Domain(format!(
                "x = {x} lies in the classical region"
            )));
        }
        Region::I => slice.x1,
        Region::III => slice.x2,
    };
    if let Potential::Harmonic { omega } = slice.model.potential {
        let a = tp.abs();
        let u = x.abs();
        let r = (u * u - a * a).max(0.0).sqrt();
        return Ok(0.5 * slice.mass() * omega * (u * r - a * a * ((u + r) / a).ln()));
    }
    forbidden_quadrature(slice, tp, x)
}

fn forbidden_quadrature(slice: &EnergySlice, tp: f64, x: f64) -> Result<f64> {
    let scale = classical_momentum(slice, x) * (x - tp).abs();
    integrate_momentum(slice, tp.min(x), tp.max(x), |p| p, 1e-14 * (1.0 + scale))
}

/// Quadrature of `sqrt(2m(V - E))` from the turning point, for any model.
pub fn forbidden_action_quadrature(slice: &EnergySlice, x: f64) -> Result<f64> {
    match slice.classify(x) {
        Region::II => Err(Error::Domain(format!(
            "x = {x} lies in the classical region"
        ))),
        Region::I => forbidden_quadrature(slice, slice.x1, x),
        Region::III => forbidden_quadrature(slice, slice.x2, x),
    }
}

/// `∂W_C/∂E = ∫_{x1}^{x} m/p_C dx`, the classical time of flight from `x1`.
pub fn classical_energy_derivative(slice: &EnergySlice, x: f64) -> Result<f64> {
    if x == slice.x1 || x == slice.x2 {
        return Err(Error::TurningPoint { x });
    }
    check_inside(slice, x)?;
    energy_derivative_unchecked(slice, x)
}

fn energy_derivative_unchecked(slice: &EnergySlice, x: f64) -> Result<f64> {
    if let Potential::Harmonic { omega } = slice.model.potential {
        let s = (x / slice.x2).clamp(-1.0, 1.0);
        return Ok((s.asin() + std::f64::consts::FRAC_PI_2) / omega);
    }
    integrate_momentum(
        slice,
        slice.x1,
        x,
        inverse(slice.mass()),
        1e-13 * (1.0 + semi_period_guess(slice)),
    )
}

fn semi_period_guess(slice: &EnergySlice) -> f64 {
    let p = momentum_inside(slice, slice.midpoint());
    slice.mass() * slice.width() / p.max(1e-300)
}

/// Classical half period `∫_{x1}^{x2} m/p_C dx`.
pub fn semi_period(slice: &EnergySlice) -> Result<f64> {
    if let Potential::Harmonic { omega } = slice.model.potential {
        return Ok(std::f64::consts::PI / omega);
    }
    energy_derivative_unchecked(slice, slice.x2)
}

/// Normalized classical position density `m / (T_half p_C)`; zero outside
/// `(x1, x2)` and unbounded at the turning points.
pub fn classical_density(slice: &EnergySlice, x: f64) -> Result<f64> {
    if !(x > slice.x1 && x < slice.x2) {
        return Ok(0.0);
    }
    let t = semi_period(slice)?;
    Ok(slice.mass() / (t * momentum_inside(slice, x)))
}

/// Probability of finding the classical particle in `[a, b]`.
pub fn classical_probability(slice: &EnergySlice, a: f64, b: f64) -> Result<f64> {
    let a = a.max(slice.x1);
    let b = b.min(slice.x2);
    if b <= a {
        return Ok(0.0);
    }
    let t = semi_period(slice)?;
    let ta = if a == slice.x1 {
        0.0
    } else {
        energy_derivative_unchecked(slice, a)?
    };
    let tb = energy_derivative_unchecked(slice, b)?;
    Ok((tb - ta) / t)
}

impl ClassicalSeries {
    /// Samples a classical quantity on a strictly increasing grid.
    ///
    /// Action and energy derivative are accumulated interval by interval and
    /// require the grid to lie in `[x1, x2]`; the turning points themselves
    /// are allowed and take their limiting values.
    pub fn sample(slice: &EnergySlice, kind: ClassicalKind, grid: &[f64]) -> Result<Self> {
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        let values = match kind {
            ClassicalKind::Momentum => grid.iter().map(|&x| classical_momentum(slice, x)).collect(),
            ClassicalKind::Density => grid
                .iter()
                .map(|&x| classical_density(slice, x))
                .collect::<Result<Vec<_>>>()?,
            ClassicalKind::ForbiddenAction => grid
                .iter()
                .map(|&x| classical_forbidden_action(slice, x))
                .collect::<Result<Vec<_>>>()?,
            ClassicalKind::Action | ClassicalKind::EnergyDerivative => {
                if let Some(&x) = grid.iter().find(|&&x| slice.classify(x) != Region::II) {
                    return Err(Error::Domain(format!(
                        "x = {x} outside the classical region"
                    )));
                }
                let m = slice.mass();
                let g = |p: f64| match kind {
                    ClassicalKind::Action => p,
                    _ if p > 0.0 => m / p,
                    _ => 0.0,
                };
                let tol = 1e-14 * (1.0 + semi_period_guess(slice) + slice.width());
                let mut out = Vec::with_capacity(grid.len());
                let mut acc = if grid.is_empty() || grid[0] == slice.x1 {
                    0.0
                } else {
                    integrate_momentum(slice, slice.x1, grid[0], g, tol)?
                };
                out.push(acc);
                for w in grid.windows(2) {
                    acc += integrate_momentum(slice, w[0], w[1], g, tol)?;
                    out.push(acc);
                }
                out.truncate(grid.len());
                out
            }
        };
        Ok(Self {
            grid: grid.to_vec(),
            values,
            kind,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialModel;
    use crate::specfun::adaptive_quadrature;
    use std::f64::consts::PI;

    fn ho(e: f64) -> EnergySlice {
        PotentialModel::unit_oscillator().slice(e).unwrap()
    }

    #[test]
    fn momentum_values() {
        let s = ho(0.5);
        assert!((classical_momentum(&s, 0.0) - 1.0).abs() < 1e-15);
        assert!(classical_momentum(&s, s.x2).abs() < 1e-7);
        assert!((classical_momentum(&s, 2.0) - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn action_values() {
        let s = ho(0.5);
        assert_eq!(classical_action(&s, s.x1).unwrap(), 0.0);
        assert!((classical_action(&s, 0.0).unwrap() - PI / 4.0).abs() < 1e-12);
        for n in [0usize, 3, 12] {
            let e = n as f64 + 0.5;
            let s = ho(e);
            assert!((classical_action(&s, s.x2).unwrap() - e * PI).abs() < 1e-11);
        }
        assert!(classical_action(&s, 1.5).is_err());
    }

    #[test]
    fn forbidden_closed_form_vs_quadrature() {
        let s = ho(20.5);
        for x in [s.x2 * 1.01, s.x2 * 1.3, s.x2 * 2.0] {
            let a = classical_forbidden_action(&s, x).unwrap();
            let b = forbidden_action_quadrature(&s, x).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} {b}");
            let a = classical_forbidden_action(&s, -x).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
        assert!(classical_forbidden_action(&s, 0.0).is_err());
        assert!(classical_forbidden_action(&s, s.x2 * (1.0 + 1e-12)).unwrap() < 1e-9);
    }

    #[test]
    fn energy_derivative() {
        let s = ho(3.5);
        assert!((classical_energy_derivative(&s, 0.0).unwrap() - PI / 2.0).abs() < 1e-14);
        let near = classical_energy_derivative(&s, s.x2 * (1.0 - 1e-14)).unwrap();
        assert!((near - PI).abs() < 1e-6);
        assert!(matches!(
            classical_energy_derivative(&s, s.x2),
            Err(Error::TurningPoint { .. })
        ));
        // quadrature path of the same quantity
        let q = PotentialModel::polynomial(1.0, vec![0.0, 0.0, 0.5], 1.0)
            .unwrap()
            .slice(3.5)
            .unwrap();
        for x in [-2.0, 0.0, 1.7] {
            let a = classical_energy_derivative(&s, x).unwrap();
            let b = classical_energy_derivative(&q, x).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn density_normalization() {
        let q = PotentialModel::quartic(1.0, 1.0, 1.0)
            .unwrap()
            .slice(1.0)
            .unwrap();
        let t = semi_period(&q).unwrap();
        let norm =
            adaptive_quadrature(|x| classical_density(&q, x).unwrap(), q.x1, q.x2, 1e-12).unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
        assert!(t > 0.0);
        assert_eq!(classical_density(&q, 2.0).unwrap(), 0.0);
        assert!(classical_density(&q, q.x2 * (1.0 - 1e-12)).unwrap() > 1e4);
    }

    #[test]
    fn series_accumulates() {
        let s = ho(10.5);
        let grid = crate::linspace(s.x1, s.x2, 101);
        let a = ClassicalSeries::sample(&s, ClassicalKind::Action, &grid).unwrap();
        assert!((a.values[100] - 10.5 * PI).abs() < 1e-10);
        assert!(a.values.windows(2).all(|w| w[1] >= w[0]));
        for (&x, &v) in grid.iter().zip(&a.values).step_by(17) {
            assert!((v - classical_action(&s, x).unwrap()).abs() < 1e-10);
        }
        let t = ClassicalSeries::sample(&s, ClassicalKind::EnergyDerivative, &grid).unwrap();
        assert!((t.values[100] - PI).abs() < 1e-9);
    }
}
