use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use super::grid::{SpectralGrid, Wavenumber};
use crate::error::{Error, Result};
use crate::real::Real;

/// Fourier coefficients of a real scalar field, `f(x) = sum_k f_hat(k) e^{i k.x}`.
#[derive(Debug, Clone)]
pub struct SpectralField<T: Real> {
    grid: Arc<SpectralGrid<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> PartialEq for SpectralField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.grid.n() == other.grid.n() && self.coeffs == other.coeffs
    }
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: &Arc<SpectralGrid<T>>) -> Self {
        Self {
            grid: Arc::clone(grid),
            coeffs: vec![Complex::zero(); grid.len()],
        }
    }

    /// Wraps a coefficient table laid out in the grid's FFT order.
    pub fn from_coeffs(grid: &Arc<SpectralGrid<T>>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Forward transform of `N x N` physical samples.
    pub fn from_physical(grid: &Arc<SpectralGrid<T>>, samples: &[T]) -> Result<Self> {
        let coeffs = grid.forward(samples)?;
        Ok(Self {
            grid: Arc::clone(grid),
            coeffs,
        })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: &Arc<SpectralGrid<T>>, f: impl Fn(T, T) -> T) -> Result<Self> {
        let n = grid.n();
        let dx = grid.dx();
        let mut samples = Vec::with_capacity(grid.len());
        for j1 in 0..n {
            for j2 in 0..n {
                samples.push(f(dx * T::lit(j1 as f64), dx * T::lit(j2 as f64)));
            }
        }
        Self::from_physical(grid, &samples)
    }

    /// Inverse transform to physical samples.
    pub fn to_physical(&self) -> Vec<T> {
        self.grid
            .inverse(&self.coeffs)
            .expect("field length matches its grid")
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Coefficient at `k`; zero for wavenumbers off the lattice.
    pub fn coeff(&self, k: Wavenumber) -> Complex<T> {
        self.grid
            .index_of(k)
            .map_or_else(Complex::zero, |i| self.coeffs[i])
    }

    /// Sets `f_hat(k) = value` and `f_hat(-k) = conj(value)`.
    pub fn set_mode(&mut self, k: Wavenumber, value: Complex<T>) -> Result<()> {
        let idx = self
            .grid
            .index_of(k)
            .ok_or_else(|| Error::Precondition(format!("wavenumber {k:?} outside the lattice")))?;
        let cj = self.grid.conjugate_index(idx);
        if cj == idx {
            self.coeffs[idx] = Complex::new(value.re, T::zero());
        } else {
            self.coeffs[idx] = value;
            self.coeffs[cj] = value.conj();
        }
        Ok(())
    }

    /// Mean value, i.e. the real part of the zero mode.
    pub fn mean(&self) -> T {
        self.coeffs[0].re
    }

    /// Discrete `L^2` norm, `(sum_k |f_hat(k)|^2)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
            .sqrt()
    }

    pub fn max_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// `max_k |f_hat(-k) - conj(f_hat(k))|`.
    pub fn hermitian_defect(&self) -> T {
        (0..self.coeffs.len()).fold(T::zero(), |m, idx| {
            let cj = self.grid.conjugate_index(idx);
            m.max((self.coeffs[cj] - self.coeffs[idx].conj()).norm())
        })
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// True when every mode outside the dealias mask is exactly zero.
    pub fn is_dealiased(&self) -> bool {
        self.coeffs
            .iter()
            .zip(self.grid.mask())
            .all(|(c, &keep)| keep || c.is_zero())
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert_eq!(self.grid.n(), other.grid.n());
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x = *x + y.scale(a);
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            coeffs: self.coeffs.iter().map(|c| c.scale(a)).collect(),
        }
    }

    /// Elementwise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Applies a real diagonal multiplier `m(k)` given as a function of the mode index.
    pub fn map_modes(&self, mut m: impl FnMut(usize, Complex<T>) -> Complex<T>) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| m(i, c))
                .collect(),
        }
    }

    /// Real part of `sum_k w(k) conj(f_hat(k)) g_hat(k)`.
    pub fn weighted_inner(&self, other: &Self, mut weight: impl FnMut(usize) -> T) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .fold(T::zero(), |acc, (i, (a, b))| acc + weight(i) * (a.conj() * b).re)
    }
}
