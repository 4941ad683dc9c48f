//! Pseudo-spectral solver for the logarithmic fractional Schrödinger equation
//!
//! ```text
//! i ∂_t u - (-Δ)^s u = λ log(|u|²) u,    0 < s <= 1,
//! ```
//!
//! on a periodic box in one or two dimensions, together with its
//! ε-regularization `2λ u log(|u| + ε)`, the associated conserved
//! quantities, and pointwise oracles for the inequalities that control the
//! nonlinearity.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! `*64`/`*32` aliases below fix the scalar.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datum;
pub mod error;
pub mod fractional;
pub mod grid;
pub mod integrator;
pub mod log_nonlinearity;
pub mod observables;
pub mod scalar;
pub mod snapshot;

pub use error::{Error, Result};
pub use fractional::{FractionalOrder, MomentOrder};
pub use grid::{ComplexField, Grid, SpectralField};
pub use integrator::{Scheme, SimParams, Trajectory};
pub use log_nonlinearity::{CouplingConstant, RegularizationLevel};
pub use observables::{ObservableRecord, Probe};
pub use scalar::Real;
pub use snapshot::Snapshot;

pub type Grid64 = Grid<f64>;
pub type Field64 = ComplexField<f64>;
pub type Spectral64 = SpectralField<f64>;
pub type Params64 = SimParams<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type Record64 = ObservableRecord<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = ComplexField<f32>;
pub type Params32 = SimParams<f32>;
