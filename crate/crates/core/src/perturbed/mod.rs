//! The perturbed operator `A = −Δ + B`, `B[w] = P∇·(U⊗w + w⊗U)`, its
//! resolvent by Neumann series, the semigroup `e^{−tA}` by contour quadrature
//! and by exponential time stepping, Duhamel integrals, and verifiers for the
//! associated smoothing, generator and critical estimates.

mod background;
mod contour;
mod duhamel;
mod neumann;
mod operator;
mod timestep;
mod verify;

pub use background::Background;
pub use contour::{semigroup_contour, ContourReport, ContourSpec, DEFAULT_CONTOUR_TOL};
pub use duhamel::{duhamel, ConstantSource, DuhamelConfig, DuhamelReport, SourcePath};
pub use neumann::{lambda_minus_a, resolvent_a, NeumannConfig, NeumannReport};
pub use operator::{apply_a, apply_b, apply_c_theta, nonlinear_term, projected_divergence};
pub use timestep::{
    semigroup_timestep, ContourPropagator, EtdCoefficients, HeatPropagator, Propagator, StepPropagator,
};
pub use verify::{
    ab_ratio, box_window_max, critical_sweep, generator_residual, propagate_path, verify_generator,
    verify_smoothing, CriticalPoint, GeneratorFit, SmoothingReport, SmoothingTrace,
};
