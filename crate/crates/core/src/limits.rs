//! Coarse graining of the quantum fields and comparison with the classical
//! quantities.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{
    classical_action, classical_density, classical_energy_derivative, classical_momentum,
    classical_probability,
};
use crate::error::{Error, Result};
use crate::model::{EnergySlice, PotentialModel};
use crate::qhj::{default_seed, integrate_x, integrate_xe, ActionField, OscillatorState};
use crate::specfun::{integrate, QuadOptions};

/// Default bin count.
pub const DEFAULT_BINS: usize = 20;
/// Bin cap for trend studies.
pub const MAX_STUDY_BINS: usize = 40;
/// Minimum samples per bin.
pub const MIN_SAMPLES_PER_BIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    MomentumRe,
    MomentumIm,
    Action,
    EnergyDerivative,
    Density,
}

impl std::fmt::Display for SourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SourceKind::MomentumRe => "momentum-re",
            SourceKind::MomentumIm => "momentum-im",
            SourceKind::Action => "action",
            SourceKind::EnergyDerivative => "energy-derivative",
            SourceKind::Density => "density",
        })
    }
}

impl std::str::FromStr for SourceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "momentum-re" => SourceKind::MomentumRe,
            "momentum-im" => SourceKind::MomentumIm,
            "action" => SourceKind::Action,
            "energy-derivative" => SourceKind::EnergyDerivative,
            "density" => SourceKind::Density,
            _ => return Err(Error::Parse(format!("unknown source kind '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseSeries {
    pub bin_centers: Vec<f64>,
    pub bin_means: Vec<f64>,
    pub bins: usize,
    pub source_kind: SourceKind,
    /// Bin edges, `bins + 1` values.
    pub edges: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationMetrics {
    pub rms: f64,
    pub max_abs: f64,
    pub rel_rms: f64,
}

/// Bin count for trend studies, `ceil(sqrt(samples))` capped.
pub fn study_bins(samples: usize) -> usize {
    ((samples as f64).sqrt().ceil() as usize).clamp(1, MAX_STUDY_BINS)
}

/// The open interval `(x1 + ε, x2 - ε)` used for binning.
pub fn binning_range(slice: &EnergySlice) -> (f64, f64) {
    let eps = slice.matching_offset();
    (slice.x1 + eps, slice.x2 - eps)
}

fn interp(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let i = grid.partition_point(|&g| g < x).clamp(1, grid.len() - 1);
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = (x - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

/// Integral means of a sampled function over `bins` equal bins of
/// `range`, by the trapezoid rule with linear interpolation at bin edges.
pub fn coarse_grain(
    grid: &[f64],
    values: &[f64],
    range: (f64, f64),
    bins: usize,
    kind: SourceKind,
) -> Result<CoarseSeries> {
    if grid.len() != values.len() || grid.len() < 2 {
        return Err(Error::Domain(
            "grid and values must have equal length of at least 2".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let (a, b) = range;
    if bins == 0 || !(a < b) || a < grid[0] || b > grid[grid.len() - 1] {
        return Err(Error::Domain(format!(
            "range [{a}, {b}] must lie within the samples [{}, {}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    let edges = crate::linspace(a, b, bins + 1);
    let mut centers = Vec::with_capacity(bins);
    let mut means = Vec::with_capacity(bins);
    for k in 0..bins {
        let (lo, hi) = (edges[k], edges[k + 1]);
        let i0 = grid.partition_point(|&g| g <= lo);
        let i1 = grid.partition_point(|&g| g < hi);
        let inside = i1.saturating_sub(i0);
        if inside < MIN_SAMPLES_PER_BIN {
            return Err(Error::Resolution {
                per_bin: inside,
                required: MIN_SAMPLES_PER_BIN,
            });
        }
        let mut xs = Vec::with_capacity(inside + 2);
        let mut ys = Vec::with_capacity(inside + 2);
        xs.push(lo);
        ys.push(interp(grid, values, lo));
        xs.extend_from_slice(&grid[i0..i1]);
        ys.extend_from_slice(&values[i0..i1]);
        xs.push(hi);
        ys.push(interp(grid, values, hi));
        let area: f64 = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum();
        centers.push(0.5 * (lo + hi));
        means.push(area / (hi - lo));
    }
    Ok(CoarseSeries {
        bin_centers: centers,
        bin_means: means,
        bins,
        source_kind: kind,
        edges,
    })
}

/// Coarse graining of one component of a region II field over
/// [`binning_range`].
pub fn coarse_grain_field(
    field: &ActionField,
    kind: SourceKind,
    bins: usize,
) -> Result<CoarseSeries> {
    let values = match kind {
        SourceKind::MomentumRe => &field.real_d1,
        SourceKind::MomentumIm => &field.imag_d1,
        SourceKind::Action => &field.real,
        SourceKind::EnergyDerivative => field
            .energy_derivative
            .as_ref()
            .ok_or_else(|| Error::Domain("field carries no energy derivative".into()))?,
        SourceKind::Density => {
            return Err(Error::Domain("density is not a field component".into()))
        }
    };
    coarse_grain(&field.grid, values, binning_range(&field.slice), bins, kind)
}

/// Integral means of `f` over the bins of `coarse`.
pub fn reference_means<F: Fn(f64) -> f64>(coarse: &CoarseSeries, f: F) -> Result<Vec<f64>> {
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_subdivisions: 200,
    };
    coarse
        .edges
        .windows(2)
        .map(|w| Ok(integrate(&f, w[0], w[1], opts)?.value / (w[1] - w[0])))
        .collect()
}

/// Bin means of the classical counterpart of `coarse.source_kind`.
/// The imaginary momentum has the classical counterpart zero.
pub fn classical_reference(slice: &EnergySlice, coarse: &CoarseSeries) -> Result<Vec<f64>> {
    let widths = coarse.edges.windows(2).map(|w| (w[0], w[1]));
    match coarse.source_kind {
        SourceKind::MomentumRe => widths
            .map(|(a, b)| Ok((classical_action(slice, b)? - classical_action(slice, a)?) / (b - a)))
            .collect(),
        SourceKind::MomentumIm => Ok(vec![0.0; coarse.bins]),
        SourceKind::Density => widths
            .map(|(a, b)| Ok(classical_probability(slice, a, b)? / (b - a)))
            .collect(),
        SourceKind::Action => {
            reference_means(coarse, |x| classical_action(slice, x).unwrap_or(f64::NAN))
        }
        SourceKind::EnergyDerivative => reference_means(coarse, |x| {
            classical_energy_derivative(slice, x).unwrap_or(f64::NAN)
        }),
    }
}

/// RMS and maximum deviation of the bin means from `reference`; `rel_rms`
/// divides the RMS by `scale`, or by `max |reference|` when `scale` is
/// `None`.
pub fn deviation_metrics(
    coarse: &CoarseSeries,
    reference: &[f64],
    scale: Option<f64>,
) -> Result<DeviationMetrics> {
    if reference.len() != coarse.bins {
        return Err(Error::Domain(format!(
            "{} reference values for {} bins",
            reference.len(),
            coarse.bins
        )));
    }
    let mut ss = 0.0;
    let mut max_abs: f64 = 0.0;
    for (m, r) in coarse.bin_means.iter().zip(reference) {
        let d = m - r;
        ss += d * d;
        max_abs = max_abs.max(d.abs());
    }
    let rms = (ss / coarse.bins as f64).sqrt();
    let norm = scale.unwrap_or_else(|| reference.iter().fold(0.0, |a: f64, r| a.max(r.abs())));
    let rel_rms = if norm > 0.0 {
        rms / norm
    } else if rms == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(DeviationMetrics {
        rms,
        max_abs,
        rel_rms,
    })
}

/// Energy bracket for level `n` between the Bohr-Sommerfeld energies of
/// `n` and `n + 1` quanta of phase (`vmin` for `n = 0`).
pub fn level_bracket(model: &PotentialModel, n: usize) -> Result<(f64, f64)> {
    let h = model.hbar;
    let vmin = model.min_potential().1;
    let phase = |e: f64| -> Result<f64> {
        let s = model.slice(e)?;
        Ok(classical_action(&s, s.x2)? / (std::f64::consts::PI * h))
    };
    let mut hi = vmin + h;
    while phase(hi)? < n as f64 + 1.5 {
        hi = vmin + 2.0 * (hi - vmin);
    }
    let target = |t: f64| -> Result<f64> {
        let (mut a, mut b) = (vmin, hi);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= vmin || phase(m)? < t {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };
    let lo = if n == 0 {
        vmin + 1e-9 * (hi - vmin)
    } else {
        target(n as f64)?
    };
    Ok((lo, target(n as f64 + 1.0)?))
}

/// Energy of level `n`: exact for the oscillator, otherwise by matching in
/// [`level_bracket`].
pub fn level_energy(model: &PotentialModel, n: usize) -> Result<f64> {
    if let Some(e) = model.oscillator_energy(n) {
        return Ok(e);
    }
    let r = crate::spectrum::find_eigenvalue(model, level_bracket(model, n)?)?;
    if r.n != n {
        return Err(Error::NotConverged(format!(
            "level search for n = {n} found n = {}",
            r.n
        )));
    }
    Ok(r.energy)
}

/// Region II field with `X_E` for level `n` on `samples` equally spaced
/// points from `x1` to `x2`.
pub fn level_field(model: &PotentialModel, n: usize, samples: usize) -> Result<ActionField> {
    let e = level_energy(model, n)?;
    let s = model.slice(e)?;
    let grid = crate::linspace(s.x1, s.x2, samples);
    let seed = default_seed(&s)?;
    let f = integrate_x(&s, &seed, &grid)?;
    integrate_xe(&f, &grid)
}

/// Samples used per level in studies: enough for ten per bin and for the
/// ripples of `X'`.
pub fn study_samples(n: usize) -> usize {
    (200 * (n + 1)).max(2001)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub energy: f64,
    pub bins: usize,
    pub momentum_rel_rms: f64,
    pub momentum_im_rel_rms: f64,
    pub action_rel_rms: f64,
    pub energy_derivative_rel_rms: f64,
    /// Local maxima of `X'` inside region II.
    pub ripples: usize,
    /// `max |X - W_C|` over the samples.
    pub action_max_dev: f64,
    pub error: Option<String>,
}

fn ripples(d1: &[f64]) -> usize {
    d1.windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2])
        .count()
}

fn study_row(model: &PotentialModel, n: usize, bins: Option<usize>) -> Result<StudyRow> {
    let samples = study_samples(n);
    let f = level_field(model, n, samples)?;
    let s = &f.slice;
    let bins = bins.unwrap_or_else(|| study_bins(samples));
    let metric = |kind: SourceKind, scale: Option<f64>| -> Result<DeviationMetrics> {
        let c = coarse_grain_field(&f, kind, bins)?;
        let r = classical_reference(s, &c)?;
        deviation_metrics(&c, &r, scale)
    };
    let mom = metric(SourceKind::MomentumRe, None)?;
    let pmax = (0..f.len())
        .map(|i| classical_momentum(s, f.grid[i]))
        .fold(0.0, f64::max);
    let im = metric(SourceKind::MomentumIm, Some(pmax))?;
    let act = metric(SourceKind::Action, None)?;
    let xe = metric(SourceKind::EnergyDerivative, None)?;
    let mut dev: f64 = 0.0;
    for (x, v) in f.grid.iter().zip(&f.real) {
        dev = dev.max((v - classical_action(s, *x)?).abs());
    }
    Ok(StudyRow {
        n,
        energy: s.energy,
        bins,
        momentum_rel_rms: mom.rel_rms,
        momentum_im_rel_rms: im.rel_rms,
        action_rel_rms: act.rel_rms,
        energy_derivative_rel_rms: xe.rel_rms,
        ripples: ripples(&f.real_d1),
        action_max_dev: dev,
        error: None,
    })
}

/// One row per level; `bins = None` uses [`study_bins`]. A failing level is
/// reported in its row and the others still run.
pub fn convergence_study(
    model: &PotentialModel,
    n_list: &[usize],
    bins: Option<usize>,
) -> Vec<StudyRow> {
    n_list
        .par_iter()
        .map(|&n| {
            study_row(model, n, bins).unwrap_or_else(|e| StudyRow {
                n,
                energy: f64::NAN,
                bins: bins.unwrap_or(0),
                momentum_rel_rms: f64::NAN,
                momentum_im_rel_rms: f64::NAN,
                action_rel_rms: f64::NAN,
                energy_derivative_rel_rms: f64::NAN,
                ripples: 0,
                action_max_dev: f64::NAN,
                error: Some(e.to_string()),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityComparison {
    pub grid: Vec<f64>,
    pub quantum: Vec<f64>,
    pub classical: Vec<f64>,
    /// Trapezoid integral of `quantum` over the grid.
    pub quantum_norm: f64,
    /// Exact classical probability of the part of `[x1, x2]` the grid covers.
    pub classical_norm: f64,
}

/// `|ψ_n|²` and the classical density at `E_n` on `grid` for the oscillator.
pub fn probability_comparison(
    model: &PotentialModel,
    n: usize,
    grid: &[f64],
) -> Result<ProbabilityComparison> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "grid must be strictly increasing with at least two points".into(),
        ));
    }
    let st = OscillatorState::new(model, n)?;
    let s = st.slice()?;
    let quantum: Vec<f64> = grid
        .iter()
        .map(|&x| st.eigenfunction(x).0.powi(2))
        .collect();
    let classical = grid
        .iter()
        .map(|&x| classical_density(&s, x))
        .collect::<Result<Vec<_>>>()?;
    let quantum_norm = grid
        .windows(2)
        .zip(quantum.windows(2))
        .map(|(x, q)| 0.5 * (x[1] - x[0]) * (q[0] + q[1]))
        .sum();
    let classical_norm = classical_probability(&s, grid[0], grid[grid.len() - 1])?;
    Ok(ProbabilityComparison {
        grid: grid.to_vec(),
        quantum,
        classical,
        quantum_norm,
        classical_norm,
    })
}

/// Coarse-grained `|ψ_n|²` against the bin means of the classical density,
/// with [`study_bins`] bins over [`binning_range`].
pub fn density_deviation(
    model: &PotentialModel,
    n: usize,
    samples: usize,
) -> Result<DeviationMetrics> {
    let st = OscillatorState::new(model, n)?;
    let s = st.slice()?;
    let grid = crate::linspace(s.x1, s.x2, samples);
    let q: Vec<f64> = grid
        .iter()
        .map(|&x| st.eigenfunction(x).0.powi(2))
        .collect();
    let c = coarse_grain(
        &grid,
        &q,
        binning_range(&s),
        study_bins(samples),
        SourceKind::Density,
    )?;
    let r = classical_reference(&s, &c)?;
    deviation_metrics(&c, &r, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear() {
        let g = crate::linspace(0.0, 1.0, 401);
        let c: Vec<f64> = vec![3.5; g.len()];
        let cs = coarse_grain(&g, &c, (0.0, 1.0), 20, SourceKind::Action).unwrap();
        assert!(cs.bin_means.iter().all(|m| (m - 3.5).abs() < 1e-14));
        let cs = coarse_grain(&g, &g, (0.013, 0.987), 20, SourceKind::Action).unwrap();
        for (m, x) in cs.bin_means.iter().zip(&cs.bin_centers) {
            assert!((m - x).abs() < 1e-14);
        }
    }

    #[test]
    fn resolution_error() {
        let g = crate::linspace(0.0, 1.0, 100);
        let err = coarse_grain(&g, &g, (0.0, 1.0), 20, SourceKind::Action).unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }));
    }

    #[test]
    fn zero_deviation() {
        let g = crate::linspace(0.0, 1.0, 401);
        let cs = coarse_grain(&g, &g, (0.0, 1.0), 20, SourceKind::Action).unwrap();
        let m = deviation_metrics(&cs, &cs.bin_means.clone(), None).unwrap();
        assert_eq!((m.rms, m.max_abs, m.rel_rms), (0.0, 0.0, 0.0));
    }

    #[test]
    fn study_bin_rule() {
        assert_eq!(study_bins(100), 10);
        assert_eq!(study_bins(101), 11);
        assert_eq!(study_bins(100_000), MAX_STUDY_BINS);
    }
}
