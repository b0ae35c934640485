//! Constructive solvers: Picard iteration for the stationary problem, direct
//! exponential time stepping and successive approximation for evolutions
//! around it, and residual checks of the differential equation.

mod direct;
mod path;
mod picard;
mod residual;
mod stationary;

pub use direct::{solve_ns_direct, DirectConfig};
pub use path::{EvolutionPath, NormTrace};
pub use picard::{solve_perturbation_picard, PicardConfig, PicardReport};
pub use residual::{check_initial_continuity, residual_differential, ContinuityFit};
pub use stationary::{
    contraction_threshold, solve_stationary, stationary_initial, stationary_map, StationaryConfig,
    StationaryResult,
};
