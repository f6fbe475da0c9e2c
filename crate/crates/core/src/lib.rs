//! Pseudo-spectral solver and verification toolkit for the two-dimensional
//! Voigt-regularized Boussinesq system on the periodic torus.

pub mod convergence;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod oracle;
pub mod real;
pub mod runner;
pub mod spectral;
pub mod timestepper;

pub use error::{Error, Result};
pub use real::Real;

use spectral::{SpectralField, SpectralGrid, VoigtParams};

/// Double-precision grid.
pub type Grid = SpectralGrid<f64>;
/// Double-precision spectral field.
pub type Field = SpectralField<f64>;
pub type Params = VoigtParams<f64>;
pub type FlowState = dynamics::State<f64>;

pub type GridF32 = SpectralGrid<f32>;
pub type FieldF32 = SpectralField<f32>;
pub type ParamsF32 = VoigtParams<f32>;
pub type FlowStateF32 = dynamics::State<f32>;
