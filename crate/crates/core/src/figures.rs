//! Data series behind the oscillator figures, on fixed grids so that the
//! output is reproducible byte for byte.
//!
//! | id | state | content |
//! |----|-------|---------|
//! | 1  | 40 | `|ψ|²` and the classical density |
//! | 2  | 2  | `X` and `W_C` |
//! | 3  | 2  | `X'` and `p_C` |
//! | 4  | 2  | `sin(X/ħ + π/4)`, `1/sqrt(X')` and their normalized product |
//! | 5  | 20 | `Im W_S` and `Im W_C` in region III |
//! | 6  | 60 | `X` and `W_C` |
//! | 7  | 60 | `X - W_C` |
//! | 8  | 60 | `X'` and `p_C` |
//! | 9  | 60 | coarse-grained `X'` (20 bins) and the `p_C` curve |
//! | 10 | 50 | `X_E` and `∂W_C/∂E` |
//! | 11 | 50 | coarse-grained `X_E` (20 bins) against `∂W_C/∂E` |

use serde_json::json;

use crate::classical::{
    classical_action, classical_energy_derivative, classical_forbidden_action, classical_momentum,
    semi_period,
};
use crate::error::{Error, Result};
use crate::io::{slice_meta, Table};
use crate::limits::{
    binning_range, classical_reference, coarse_grain_field, probability_comparison, SourceKind,
    DEFAULT_BINS,
};
use crate::model::{PotentialModel, Region};
use crate::qhj::{
    default_seed, integrate_x, integrate_xe, integrate_y_forbidden, special_action_ho,
    wavefunction_from_action, ActionField, OscillatorState,
};

pub const FIGURE_IDS: std::ops::RangeInclusive<u8> = 1..=11;

/// Samples across region II.
const MID_SAMPLES: usize = 2001;

/// One output series; `suffix` is appended to the figure name when a figure
/// has more than one file.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub suffix: Option<&'static str>,
    pub table: Table,
}

fn single(table: Table) -> Vec<FigureSeries> {
    vec![FigureSeries {
        suffix: None,
        table,
    }]
}

fn state_field(model: &PotentialModel, n: usize, samples: usize) -> Result<ActionField> {
    let st = OscillatorState::new(model, n)?;
    let s = st.slice()?;
    let grid = crate::linspace(s.x1, s.x2, samples);
    let seed = default_seed(&s)?;
    integrate_x(&s, &seed, &grid)
}

fn classical_column(f: &ActionField, g: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    f.grid.iter().map(|&x| g(x)).collect()
}

fn figure_meta(id: u8, n: usize, f: &ActionField) -> serde_json::Map<String, serde_json::Value> {
    let mut m = slice_meta("figure", &f.slice);
    m.insert("figure".into(), json!(id));
    m.insert("n".into(), json!(n));
    m
}

/// Series for figure `id` (1 to 11) of the oscillator `model`.
pub fn figure_data(model: &PotentialModel, id: u8) -> Result<Vec<FigureSeries>> {
    if model.omega().is_none() {
        return Err(Error::Domain(
            "figures are defined for the harmonic oscillator".into(),
        ));
    }
    match id {
        1 => fig1(model),
        2 | 6 => {
            let n = if id == 2 { 2 } else { 60 };
            let f = state_field(model, n, MID_SAMPLES)?;
            let wc = classical_column(&f, |x| classical_action(&f.slice, x))?;
            Ok(single(Table::from_columns(
                figure_meta(id, n, &f),
                &[("x", &f.grid), ("X", &f.real), ("W_C", &wc)],
            )?))
        }
        3 | 8 => {
            let n = if id == 3 { 2 } else { 60 };
            let f = state_field(model, n, MID_SAMPLES)?;
            let pc = classical_column(&f, |x| Ok(classical_momentum(&f.slice, x)))?;
            Ok(single(Table::from_columns(
                figure_meta(id, n, &f),
                &[("x", &f.grid), ("re_p", &f.real_d1), ("p_C", &pc)],
            )?))
        }
        4 => fig4(model),
        5 => fig5(model),
        7 => {
            let f = state_field(model, 60, MID_SAMPLES)?;
            let wc = classical_column(&f, |x| classical_action(&f.slice, x))?;
            let d: Vec<f64> = f.real.iter().zip(&wc).map(|(a, b)| a - b).collect();
            Ok(single(Table::from_columns(
                figure_meta(7, 60, &f),
                &[("x", &f.grid), ("X_minus_W_C", &d)],
            )?))
        }
        9 => fig9(model),
        10 | 11 => fig10_11(model, id),
        _ => Err(Error::Domain(format!(
            "unknown figure {id}; expected 1 to 11"
        ))),
    }
}

fn fig1(model: &PotentialModel) -> Result<Vec<FigureSeries>> {
    let n = 40;
    let s = OscillatorState::new(model, n)?.slice()?;
    let pad = 0.25 * s.width();
    let grid = crate::linspace(s.x1 - pad, s.x2 + pad, 8001);
    let c = probability_comparison(model, n, &grid)?;
    let mut m = slice_meta("figure", &s);
    m.insert("figure".into(), json!(1));
    m.insert("n".into(), json!(n));
    m.insert("quantum_norm".into(), json!(c.quantum_norm));
    m.insert("classical_norm".into(), json!(c.classical_norm));
    Ok(single(Table::from_columns(
        m,
        &[
            ("x", &c.grid),
            ("quantum", &c.quantum),
            ("classical", &c.classical),
        ],
    )?))
}

fn fig4(model: &PotentialModel) -> Result<Vec<FigureSeries>> {
    let n = 2;
    let st = OscillatorState::new(model, n)?;
    let s = st.slice()?;
    let h = s.hbar();
    let pad = 0.5 * s.width();
    let mid = state_field(model, n, MID_SAMPLES)?;
    let left = integrate_y_forbidden(&s, Region::I, &crate::linspace(s.x1 - pad, s.x1, 401))?;
    let right = integrate_y_forbidden(&s, Region::III, &crate::linspace(s.x2, s.x2 + pad, 401))?;
    let wf = wavefunction_from_action(&left, &mid, &right)?;
    let a = wf.amplitudes[1];
    // sign convention of the analytic eigenfunction
    let dot: f64 = mid
        .grid
        .iter()
        .zip(&mid.real)
        .zip(&mid.real_d1)
        .map(|((x, xr), d1)| {
            st.eigenfunction(*x).0 * (xr / h + std::f64::consts::FRAC_PI_4).sin() / d1.sqrt()
        })
        .sum();
    let a = a * dot.signum();
    let sine: Vec<f64> = mid
        .real
        .iter()
        .map(|x| (x / h + std::f64::consts::FRAC_PI_4).sin())
        .collect();
    let amp: Vec<f64> = mid.real_d1.iter().map(|d| 1.0 / d.sqrt()).collect();
    let product: Vec<f64> = sine.iter().zip(&amp).map(|(s, r)| a * s * r).collect();
    let exact: Vec<f64> = mid.grid.iter().map(|&x| st.eigenfunction(x).0).collect();
    let mut m = figure_meta(4, n, &mid);
    m.insert("amplitude".into(), json!(a));
    Ok(single(Table::from_columns(
        m,
        &[
            ("x", &mid.grid),
            ("sine", &sine),
            ("inv_sqrt_X1", &amp),
            ("product", &product),
            ("eigenfunction", &exact),
        ],
    )?))
}

fn fig5(model: &PotentialModel) -> Result<Vec<FigureSeries>> {
    let n = 20;
    let s = OscillatorState::new(model, n)?.slice()?;
    let grid = crate::linspace(s.x2, 3.0 * s.x2, 2001);
    let w0 = special_action_ho(n, s.x2, model)?.im;
    let ws = grid
        .iter()
        .map(|&x| Ok(special_action_ho(n, x, model)?.im - w0))
        .collect::<Result<Vec<_>>>()?;
    let wc = grid
        .iter()
        .map(|&x| classical_forbidden_action(&s, x))
        .collect::<Result<Vec<_>>>()?;
    let mut m = slice_meta("figure", &s);
    m.insert("figure".into(), json!(5));
    m.insert("n".into(), json!(n));
    Ok(single(Table::from_columns(
        m,
        &[("x", &grid), ("im_W_S", &ws), ("im_W_C", &wc)],
    )?))
}

fn fig9(model: &PotentialModel) -> Result<Vec<FigureSeries>> {
    let n = 60;
    let f = state_field(model, n, 4001)?;
    let c = coarse_grain_field(&f, SourceKind::MomentumRe, DEFAULT_BINS)?;
    let reference = classical_reference(&f.slice, &c)?;
    let at_center: Vec<f64> = c
        .bin_centers
        .iter()
        .map(|&x| classical_momentum(&f.slice, x))
        .collect();
    let mut m = figure_meta(9, n, &f);
    m.insert("bins".into(), json!(c.bins));
    m.insert("range".into(), json!(binning_range(&f.slice)));
    let coarse = Table::from_columns(
        m,
        &[
            ("bin_center", &c.bin_centers),
            ("bin_mean", &c.bin_means),
            ("p_C_mean", &reference),
            ("p_C_center", &at_center),
        ],
    )?;
    let curve_x = crate::linspace(f.slice.x1, f.slice.x2, 401);
    let curve: Vec<f64> = curve_x
        .iter()
        .map(|&x| classical_momentum(&f.slice, x))
        .collect();
    let curve = Table::from_columns(figure_meta(9, n, &f), &[("x", &curve_x), ("p_C", &curve)])?;
    Ok(vec![
        FigureSeries {
            suffix: None,
            table: coarse,
        },
        FigureSeries {
            suffix: Some("classical"),
            table: curve,
        },
    ])
}

fn fig10_11(model: &PotentialModel, id: u8) -> Result<Vec<FigureSeries>> {
    let n = 50;
    let f = state_field(model, n, 4001)?;
    let f = integrate_xe(&f, &f.grid.clone())?;
    if id == 10 {
        // ∂W_C/∂E is singular only in its derivative at the turning points;
        // use its limiting values there
        let s = &f.slice;
        let last = f.len() - 1;
        let half = semi_period(s)?;
        let dwc = f
            .grid
            .iter()
            .enumerate()
            .map(|(i, &x)| match i {
                0 => Ok(0.0),
                i if i == last => Ok(half),
                _ => classical_energy_derivative(s, x),
            })
            .collect::<Result<Vec<_>>>()?;
        let xe = f.energy_derivative.clone().unwrap_or_default();
        return Ok(single(Table::from_columns(
            figure_meta(10, n, &f),
            &[("x", &f.grid), ("XE", &xe), ("dW_C_dE", &dwc)],
        )?));
    }
    let c = coarse_grain_field(&f, SourceKind::EnergyDerivative, DEFAULT_BINS)?;
    let reference = classical_reference(&f.slice, &c)?;
    let mut m = figure_meta(11, n, &f);
    m.insert("bins".into(), json!(c.bins));
    Ok(single(Table::from_columns(
        m,
        &[
            ("bin_center", &c.bin_centers),
            ("bin_mean", &c.bin_means),
            ("dW_C_dE_mean", &reference),
        ],
    )?))
}
