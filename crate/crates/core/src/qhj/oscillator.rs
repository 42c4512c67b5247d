//! Closed-form special and general solutions for the harmonic oscillator.
//!
//! Internally the Hermite polynomials enter through the normalized Hermite
//! functions `h_n(ξ)`, `ξ = sqrt(mω/ħ) x`, so the constant `C0` of the
//! general solution refers to `u(x) = h_n(ξ)` rather than `H_n e^{-ξ²/2}`.

use num_complex::Complex64;

use super::{
    check_increasing, merge_points, phase_points, unwrap_phase, ActionField, MomentumSeries,
    Provenance,
};
use crate::error::{Error, Result};
use crate::model::{EnergySlice, PotentialModel, Region};
use crate::specfun::{
    hermite_function, hermite_function_complex, hermite_function_pair, hermite_log_norm,
    hermite_ratio_complex, hermite_zeros, integrate, QuadOptions,
};

const NODE_TOL: f64 = 1e-10;

/// Oscillator eigenstate `n` with its scale and the nodes of `H_n`.
#[derive(Debug, Clone)]
pub struct OscillatorState {
    pub n: usize,
    pub model: PotentialModel,
    pub omega: f64,
    /// `sqrt(mω/ħ)`
    pub alpha: f64,
    /// Nodes in `x`.
    pub nodes: Vec<f64>,
}

impl OscillatorState {
    pub fn new(model: &PotentialModel, n: usize) -> Result<Self> {
        let omega = model
            .omega()
            .ok_or_else(|| Error::Domain("closed forms need the harmonic oscillator".into()))?;
        if n > crate::specfun::HERMITE_MAX_ORDER {
            return Err(Error::HermiteOrder {
                n,
                max: crate::specfun::HERMITE_MAX_ORDER,
            });
        }
        let alpha = (model.mass * omega / model.hbar).sqrt();
        let nodes = hermite_zeros(n).into_iter().map(|z| z / alpha).collect();
        Ok(Self {
            n,
            model: model.clone(),
            omega,
            alpha,
            nodes,
        })
    }

    pub fn energy(&self) -> f64 {
        self.model.hbar * self.omega * (self.n as f64 + 0.5)
    }

    pub fn slice(&self) -> Result<EnergySlice> {
        self.model.slice(self.energy())
    }

    pub fn nearest_node(&self, x: f64) -> Option<f64> {
        self.nodes
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
    }

    fn check_node(&self, x: f64) -> std::result::Result<(), f64> {
        match self.nearest_node(x) {
            Some(z) if (z - x).abs() <= NODE_TOL => Err(z),
            _ => Ok(()),
        }
    }

    /// Normalized eigenfunction `sqrt(α) h_n(αx)` and its derivative.
    pub fn eigenfunction(&self, x: f64) -> (f64, f64) {
        let (h, d) = hermite_function(self.n, self.alpha * x);
        let s = self.alpha.sqrt();
        (s * h, s * self.alpha * d)
    }
}

/// `p_S = i(mωx - 2n sqrt(mωħ) H_{n-1}(ξ)/H_n(ξ))`.
pub fn special_momentum_ho(n: usize, x: f64, model: &PotentialModel) -> Result<Complex64> {
    let st = OscillatorState::new(model, n)?;
    st.check_node(x).map_err(|node| Error::Pole { node, x })?;
    let mw = model.mass * st.omega;
    if n == 0 {
        return Ok(Complex64::new(0.0, mw * x));
    }
    let (h, hm1) = hermite_function_pair(n, st.alpha * x);
    let ratio = (2.0 * n as f64).sqrt() * (mw * model.hbar).sqrt() * hm1 / h;
    Ok(Complex64::new(0.0, mw * x - ratio))
}

/// `p_S` continued to complex `z`.
pub fn special_momentum_ho_complex(
    n: usize,
    z: Complex64,
    model: &PotentialModel,
) -> Result<Complex64> {
    let st = OscillatorState::new(model, n)?;
    let mw = model.mass * st.omega;
    let i = Complex64::new(0.0, 1.0);
    if n == 0 {
        return Ok(i * mw * z);
    }
    let r = hermite_ratio_complex(n, st.alpha * z);
    Ok(i * (mw * z - 2.0 * n as f64 * (mw * model.hbar).sqrt() * r))
}

/// `W_S = i(mωx²/2 - ħ log|H_n(ξ)|)`.
pub fn special_action_ho(n: usize, x: f64, model: &PotentialModel) -> Result<Complex64> {
    let st = OscillatorState::new(model, n)?;
    st.check_node(x)
        .map_err(|node| Error::LogDivergence { node, x })?;
    // mωx²/2 = ħξ²/2 cancels the Gaussian factor of h_n
    let (h, _) = hermite_function_pair(n, st.alpha * x);
    Ok(Complex64::new(
        0.0,
        -model.hbar * (h.abs().ln() + hermite_log_norm(n)),
    ))
}

/// `W_S` continued to complex `z` (principal logarithm).
pub fn special_action_ho_complex(
    n: usize,
    z: Complex64,
    model: &PotentialModel,
) -> Result<Complex64> {
    let st = OscillatorState::new(model, n)?;
    let (h, _) = hermite_function_complex(n, st.alpha * z);
    let i = Complex64::new(0.0, 1.0);
    Ok(i * (-model.hbar) * (h.ln() + hermite_log_norm(n)))
}

/// Special solution as an action field: `X` is the step function
/// `ħ Arg H_n` (0 or πħ), `Y = Im W_S`.
pub fn special_field_ho(n: usize, model: &PotentialModel, grid: &[f64]) -> Result<ActionField> {
    check_increasing(grid)?;
    let st = OscillatorState::new(model, n)?;
    let slice = st.slice()?;
    let h = model.hbar;
    let mut real = Vec::with_capacity(grid.len());
    let mut imag = Vec::with_capacity(grid.len());
    let mut imag_d1 = Vec::with_capacity(grid.len());
    for &x in grid {
        let (hv, _) = hermite_function_pair(n, st.alpha * x);
        real.push(if hv < 0.0 {
            std::f64::consts::PI * h
        } else {
            0.0
        });
        imag.push(special_action_ho(n, x, model)?.im);
        imag_d1.push(special_momentum_ho(n, x, model)?.im);
    }
    let len = grid.len();
    let region = if grid.iter().all(|&x| slice.classify(x) == Region::II) {
        Region::II
    } else {
        slice.classify(grid[len / 2])
    };
    Ok(ActionField {
        slice,
        region,
        grid: grid.to_vec(),
        real,
        real_d1: vec![0.0; len],
        real_d2: vec![0.0; len],
        imag,
        imag_d1,
        energy_derivative: None,
        seed: None,
    })
}

/// Finite-part primitive `∫_{ξa} dξ / h_n(ξ)²` at ascending real points,
/// evaluated along `Im ξ = η` with vertical connections; the double poles
/// at the nodes have zero residue, so the detour gives the finite part.
/// Points flagged in `skip` sit on a pole of the primitive and get NaN.
fn finite_part_primitive(
    n: usize,
    xi_a: f64,
    pts: &[f64],
    skip: &[bool],
    eta: f64,
) -> Result<Vec<f64>> {
    let f = |z: Complex64| {
        let (h, _) = hermite_function_complex(n, z);
        1.0 / (h * h)
    };
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_subdivisions: 4000,
    };
    let i = Complex64::new(0.0, 1.0);
    let vertical = |x: f64| -> Result<Complex64> {
        if eta == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(integrate(|t| f(Complex64::new(x, t)) * i, 0.0, eta, opts)?.value)
    };
    let horizontal = |a: f64, b: f64| -> Result<Complex64> {
        Ok(integrate(|t| f(Complex64::new(t, eta)), a, b, opts)?.value)
    };
    let base = vertical(xi_a)?;
    let mut out = Vec::with_capacity(pts.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut last = xi_a;
    for (&p, &sk) in pts.iter().zip(skip) {
        acc += horizontal(last, p)?;
        last = p;
        out.push(if sk {
            f64::NAN
        } else {
            (base + acc - vertical(p)?).re
        });
    }
    Ok(out)
}

/// General solution `p_G`, `W_G` on a region-II grid.
///
/// `C0 = None` selects the constant that puts the phase at `-π/4` in `x1`
/// and `π/4 (mod π)` in `x2`; with the odd finite-part primitive `G` used
/// here it is real and positive. `C1 = None` selects `X(x1) = 0` and
/// `Y = ħ log sqrt(X')`.
pub fn general_solution_ho(
    n: usize,
    model: &PotentialModel,
    grid: &[f64],
    c0: Option<Complex64>,
    c1: Option<Complex64>,
) -> Result<(ActionField, MomentumSeries)> {
    check_increasing(grid)?;
    let st = OscillatorState::new(model, n)?;
    let slice = st.slice()?;
    if let Some(&x) = grid.iter().find(|&&x| slice.classify(x) != Region::II) {
        return Err(Error::Domain(format!(
            "x = {x} outside the classical region"
        )));
    }
    let h = model.hbar;
    let a = st.alpha;
    let (pts, idx) = merge_points(grid, &phase_points(&slice));
    let xi: Vec<f64> = pts.iter().map(|x| a * x).collect();
    let zeros = hermite_zeros(n);
    let eta = if zeros.len() < 2 {
        if zeros.is_empty() {
            0.0
        } else {
            0.5
        }
    } else {
        0.5 * zeros
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    };
    let near_node = |x: f64| {
        st.nodes
            .iter()
            .any(|nd| (nd - x).abs() < 1e-12 * (1.0 + nd.abs()))
    };
    let skip: Vec<bool> = pts.iter().map(|&x| near_node(x)).collect();
    // odd primitive: subtract half the total so G(x1) = -G(x2)
    let g_xi = finite_part_primitive(n, xi[0], &xi, &skip, eta)?;
    let total = *g_xi.last().unwrap();
    let g: Vec<f64> = g_xi.iter().map(|v| (v - 0.5 * total) / a).collect();
    let g1 = g[0];
    let g2 = *g.last().unwrap();

    let c0 = c0.unwrap_or_else(|| {
        let cr = (g2 - g1) / (2.0 * h);
        Complex64::new(cr, -cr - g1 / h)
    });
    if !(c0.re > 0.0) {
        return Err(Error::Domain(format!(
            "Re C0 = {} must be positive for X' > 0",
            c0.re
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let sa = a.sqrt();
    let npts = pts.len();
    let mut z = Vec::with_capacity(npts);
    let mut dz = Vec::with_capacity(npts);
    let mut wrapped = Vec::with_capacity(npts);
    for k in 0..npts {
        let (u, du) = {
            let (hv, dv) = hermite_function(n, xi[k]);
            (sa * hv, sa * a * dv)
        };
        // second solution uG with unit Wronskian, finite at nodes
        let near = skip[k];
        let (w, dw) = if near {
            (-1.0 / du, 0.0)
        } else {
            (u * g[k], du * g[k] + 1.0 / u)
        };
        let zk = c0 * u + i * w / h;
        let dzk = c0 * du + i * dw / h;
        let arg_h = if u < 0.0 { std::f64::consts::PI } else { 0.0 };
        let bracket = c0 + i * g[k] / h;
        wrapped.push(if near {
            zk.arg()
        } else {
            arg_h + bracket.arg()
        });
        z.push(zk);
        dz.push(dzk);
    }
    let x1d: Vec<f64> = z.iter().map(|zk| c0.re / zk.norm_sqr()).collect();
    let rate: Vec<f64> = x1d.iter().map(|d| d / h).collect();
    let theta = unwrap_phase(&pts, &wrapped, &rate, std::f64::consts::PI)?;
    let c1 = c1.unwrap_or_else(|| Complex64::new(-h * theta[0], 0.5 * h * c0.re.ln()));

    let mut field_x = Vec::with_capacity(grid.len());
    let mut field_d1 = Vec::with_capacity(grid.len());
    let mut field_d2 = Vec::with_capacity(grid.len());
    let mut field_y = Vec::with_capacity(grid.len());
    let mut field_y1 = Vec::with_capacity(grid.len());
    for &k in &idx {
        let d1 = x1d[k];
        let y1 = -h * (dz[k] * z[k].conj()).re / z[k].norm_sqr();
        field_x.push(h * theta[k] + c1.re);
        field_d1.push(d1);
        field_d2.push(2.0 * d1 * y1 / h);
        field_y.push(-h * z[k].norm().ln() + c1.im);
        field_y1.push(y1);
    }
    let field = ActionField {
        slice,
        region: Region::II,
        grid: grid.to_vec(),
        real: field_x,
        real_d1: field_d1.clone(),
        real_d2: field_d2,
        imag: field_y,
        imag_d1: field_y1.clone(),
        energy_derivative: None,
        seed: None,
    };
    let momentum = MomentumSeries {
        grid: grid.to_vec(),
        re: field_d1,
        im: field_y1,
        provenance: Provenance::General,
    };
    Ok((field, momentum))
}
