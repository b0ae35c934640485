//! Pseudo-spectral calculus on the periodic torus for homogeneous Besov and
//! weak-Lebesgue norms, Fourier multipliers, the Stokes semigroup perturbed
//! by a stationary background, and Picard solvers for stationary and
//! perturbed Navier–Stokes flows.
//!
//! Conventions: the forward transform divides by `N^n`, so a real field
//! `cos(x_1)` carries coefficient `1/2` at `m = ±e_1`. The zero mode of every
//! field is pinned to zero (homogeneous spaces).

// `!(x > 0.0)` is used on purpose so that NaN fails every precondition.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
mod fft;
pub mod field;
pub mod grid;
pub mod multipliers;
pub mod norms;
pub mod perturbed;
pub mod quadrature;
pub mod random;
pub mod snapshot;
pub mod solvers;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
pub use field::{Components, SpectralField, VectorField};
pub use grid::Grid;
pub use norms::{besov_norm, lp_norm, weak_lp_norm, BesovIndex};
pub use num_complex::Complex64;
pub use perturbed::Background;
