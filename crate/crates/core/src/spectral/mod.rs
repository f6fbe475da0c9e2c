//! Fourier-space machinery on the periodic square `[0, 2pi)^2`.

mod field;
mod grid;
mod ops;

pub use field::SpectralField;
pub use grid::{make_grid, SpectralGrid, Wavenumber};
pub use ops::{
    biot_savart, dealias, dealias_in_place, divergence_flux, voigt_inverse_multiplier,
    voigt_symbol, VoigtParams,
};
pub(crate) use ops::flux_from_physical;
