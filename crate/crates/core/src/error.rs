use thiserror::Error;

use crate::ode::OdeError;

/// Library error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Hermite order {n} exceeds the supported maximum {max}")]
    HermiteOrder { n: usize, max: usize },

    #[error("Hermite evaluation overflowed at n = {n}, x = {x}")]
    HermiteRange { n: usize, x: f64 },

    #[error("quadrature did not converge: estimate {estimate_re} + {estimate_im}i, error bound {error_bound}")]
    Quadrature {
        estimate_re: f64,
        estimate_im: f64,
        error_bound: f64,
    },

    #[error("contour integral did not converge with {samples} samples (last change {change})")]
    Contour { samples: usize, change: f64 },

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("energy {energy} is not above the potential minimum {min_potential}")]
    NoClassicalRegion { energy: f64, min_potential: f64 },

    #[error("potential has {sign_changes} sign changes of V - E on the probe grid; only single wells are supported")]
    MultiWell { sign_changes: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at turning point x = {x}")]
    TurningPoint { x: f64 },

    #[error("pole of the special momentum at node x = {node} (evaluated at {x})")]
    Pole { node: f64, x: f64 },

    #[error("logarithmic divergence of the special action at node x = {node} (evaluated at {x})")]
    LogDivergence { node: f64, x: f64 },

    #[error("grid too coarse near x = {x}: phase step {step} exceeds pi/2")]
    GridTooCoarse { x: f64, step: f64 },

    #[error("X' vanished near x = {x}; the Cauchy seed is not admissible")]
    VanishingSlope { x: f64 },

    #[error("seed residual {residual:e} above tolerance {tolerance:e}")]
    Seed { residual: f64, tolerance: f64 },

    #[error("forbidden-region domain too short: V(x_far) = {v_far} below 2E = {two_e}")]
    DomainTooShort { v_far: f64, two_e: f64 },

    #[error("Wronskian drift {drift:e} above tolerance")]
    WronskianDrift { drift: f64 },

    #[error("matching failed: derivative discontinuity {discontinuity:e} at x = {x} (energy is not an eigenvalue)")]
    NonEigenvalue { x: f64, discontinuity: f64 },

    #[error("no sign change on bracket [{lo}, {hi}] (f = {f_lo:e}, {f_hi:e})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root search did not converge: {0}")]
    NotConverged(String),

    #[error("too few samples per bin: {per_bin} < {required}")]
    Resolution { per_bin: usize, required: usize },

    #[error("ODE integration failed: {0}")]
    Ode(#[from] OdeError),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the inputs (bad energy, bracket, grid, ...)
    /// as opposed to failures of a numerical method.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::HermiteOrder { .. }
                | Error::InvalidContour(_)
                | Error::InvalidModel(_)
                | Error::NoClassicalRegion { .. }
                | Error::MultiWell { .. }
                | Error::Domain(_)
                | Error::TurningPoint { .. }
                | Error::Pole { .. }
                | Error::LogDivergence { .. }
                | Error::GridTooCoarse { .. }
                | Error::DomainTooShort { .. }
                | Error::NonEigenvalue { .. }
                | Error::Bracket { .. }
                | Error::Resolution { .. }
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
