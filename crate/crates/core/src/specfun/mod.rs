//! Special functions and quadrature primitives.

mod contour;
mod dawson;
mod hermite;
mod quadrature;

pub use contour::{contour_integral, gauss_legendre, Contour, ContourKind, MIN_CONTOUR_SAMPLES};
pub use dawson::{dawson, erfi};
pub use hermite::{
    hermite_eval, hermite_function, hermite_function_complex, hermite_function_pair,
    hermite_log_norm, hermite_ratio_complex, hermite_zeros, HERMITE_MAX_ORDER,
};
pub use quadrature::{
    adaptive_quadrature, adaptive_quadrature_offsets, integrate, QuadEstimate, QuadOptions,
    QuadValue,
};
