//! Fourier multipliers: generic symbols, Leray projection, fractional
//! Laplacian, resolvent powers, composition operators and the heat semigroup.

mod operators;
mod symbol;

pub use operators::{
    composition, divergence, frac_laplacian, gradient, heat_semigroup, lambda_plus_laplacian, laplacian,
    leray_project, resolvent_laplacian, resolvent_lp_gain, GainReport,
};
pub use symbol::{apply_multiplier, apply_multiplier_dyadic, resolvent_symbol, MultiplierSymbol, SectorPoint, DEFAULT_OMEGA};
