use num_complex::Complex;
use num_traits::Zero;

use super::field::SpectralField;
use super::grid::{SpectralGrid, Wavenumber};
use crate::error::{Error, Result};
use crate::real::Real;

/// Regularization strength `epsilon` and the fractional exponents applied to
/// the vorticity (`alpha`) and temperature (`beta`) equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoigtParams<T: Real> {
    pub epsilon: T,
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> VoigtParams<T> {
    pub fn new(epsilon: T, alpha: T, beta: T) -> Result<Self> {
        for (key, v) in [("params.epsilon", epsilon), ("params.alpha", alpha), ("params.beta", beta)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::config(key, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self { epsilon, alpha, beta })
    }

    /// The classical Voigt system, `alpha = beta = 1`.
    pub fn classical(epsilon: T) -> Result<Self> {
        Self::new(epsilon, T::one(), T::one())
    }

    /// Inviscid Boussinesq (`epsilon = 0`).
    pub fn boussinesq() -> Self {
        Self {
            epsilon: T::zero(),
            alpha: T::one(),
            beta: T::one(),
        }
    }

    pub fn is_unregularized(&self) -> bool {
        self.epsilon == T::zero()
    }

    pub fn is_classical(&self) -> bool {
        self.alpha == T::one() && self.beta == T::one()
    }
}

/// `(1 + epsilon |k|)^{-exponent}` evaluated from `|k|`.
#[inline]
pub fn voigt_symbol<T: Real>(kmag: T, epsilon: T, exponent: T) -> T {
    if epsilon == T::zero() || exponent == T::zero() {
        return T::one();
    }
    (T::one() + epsilon * kmag).powf(-exponent)
}

/// Fourier symbol of `(I + epsilon Lambda)^{-exponent}` at wavenumber `k`.
pub fn voigt_inverse_multiplier<T: Real>(k: Wavenumber, params: &VoigtParams<T>, exponent: T) -> T {
    voigt_symbol(k.norm(), params.epsilon, exponent)
}

/// Zeroes every mode outside the 2/3-rule mask.
pub fn dealias<T: Real>(f: &SpectralField<T>) -> SpectralField<T> {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place<T: Real>(f: &mut SpectralField<T>) {
    let grid = std::sync::Arc::clone(f.grid());
    for (c, &keep) in f.coeffs_mut().iter_mut().zip(grid.mask()) {
        if !keep {
            *c = Complex::zero();
        }
    }
}

/// Velocity `u = grad^perp Delta^{-1} omega` with `grad^perp = (-d2, d1)`.
///
/// Fails if the mean vorticity is not negligible: the inversion fixes the
/// gauge `u_hat(0) = 0` and silently dropping a mean would change the flow.
pub fn biot_savart<T: Real>(omega: &SpectralField<T>) -> Result<(SpectralField<T>, SpectralField<T>)> {
    let mean = omega.coeffs()[0].norm();
    if mean != T::zero() {
        let tolerance = T::lit(1e-12) * omega.l2_norm();
        if mean >= tolerance {
            return Err(Error::MeanVorticity {
                mean: mean.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
    }
    Ok(biot_savart_unchecked(omega))
}

fn biot_savart_unchecked<T: Real>(
    omega: &SpectralField<T>,
) -> (SpectralField<T>, SpectralField<T>) {
    let grid = std::sync::Arc::clone(omega.grid());
    let (k1, k2, kmag) = (grid.k1(), grid.k2(), grid.kmag());
    // u1_hat = i k2 w / |k|^2, u2_hat = -i k1 w / |k|^2
    let u1 = omega.map_modes(|i, w| {
        if i == 0 {
            return Complex::zero();
        }
        let s = k2[i] / (kmag[i] * kmag[i]);
        Complex::new(-w.im * s, w.re * s)
    });
    let u2 = omega.map_modes(|i, w| {
        if i == 0 {
            return Complex::zero();
        }
        let s = k1[i] / (kmag[i] * kmag[i]);
        Complex::new(w.im * s, -w.re * s)
    });
    (u1, u2)
}

/// Dealiased Fourier coefficients of `div(u f)`.
///
/// Products are formed pointwise on the grid, transformed back and truncated
/// to the mask before the derivative is applied, so the zero mode is exactly 0.
pub fn divergence_flux<T: Real>(
    u1: &SpectralField<T>,
    u2: &SpectralField<T>,
    f: &SpectralField<T>,
) -> Result<SpectralField<T>> {
    let grid = f.grid();
    for other in [u1, u2] {
        if other.grid().n() != grid.n() {
            return Err(Error::GridMismatch {
                expected: grid.n(),
                found: other.grid().n(),
            });
        }
    }
    let (u1p, u2p) = grid.inverse_pair(u1.coeffs(), u2.coeffs())?;
    let fp = f.to_physical();
    flux_from_physical(grid, &u1p, &u2p, &fp)
}

pub(crate) fn flux_from_physical<T: Real>(
    grid: &std::sync::Arc<SpectralGrid<T>>,
    u1: &[T],
    u2: &[T],
    f: &[T],
) -> Result<SpectralField<T>> {
    let a: Vec<T> = u1.iter().zip(f).map(|(&u, &v)| u * v).collect();
    let b: Vec<T> = u2.iter().zip(f).map(|(&u, &v)| u * v).collect();
    let (ah, bh) = grid.forward_pair(&a, &b)?;
    let (k1, k2, mask) = (grid.k1(), grid.k2(), grid.mask());
    let coeffs = (0..grid.len())
        .map(|i| {
            if !mask[i] || i == 0 {
                return Complex::zero();
            }
            // i (k1 a_hat + k2 b_hat)
            let s = ah[i].scale(k1[i]) + bh[i].scale(k2[i]);
            Complex::new(-s.im, s.re)
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs)
}
