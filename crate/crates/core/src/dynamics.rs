//! Right-hand side of the (fractional) Voigt-Boussinesq system in divergence form:
//!
//! ```text
//! d_t omega = (I + eps Lambda)^{-alpha} [ -div(u omega) + d_1 theta ]
//! d_t theta = -(I + eps Lambda)^{-beta} div(u theta)
//! u = grad^perp Delta^{-1} omega
//! ```

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{
    biot_savart, flux_from_physical, voigt_symbol, SpectralField, SpectralGrid, VoigtParams,
};

/// Vorticity, temperature and time.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T: Real> {
    pub omega: SpectralField<T>,
    pub theta: SpectralField<T>,
    pub t: T,
}

impl<T: Real> State<T> {
    pub fn new(omega: SpectralField<T>, theta: SpectralField<T>, t: T) -> Result<Self> {
        if omega.grid().n() != theta.grid().n() {
            return Err(Error::GridMismatch {
                expected: omega.grid().n(),
                found: theta.grid().n(),
            });
        }
        Ok(Self { omega, theta, t })
    }

    pub fn rest(grid: &Arc<SpectralGrid<T>>) -> Self {
        Self {
            omega: SpectralField::zeros(grid),
            theta: SpectralField::zeros(grid),
            t: T::zero(),
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        self.omega.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.omega.is_finite() && self.theta.is_finite()
    }

    /// Mean-free vorticity and both fields inside the dealias mask.
    pub fn satisfies_invariants(&self) -> bool {
        self.omega.coeffs()[0].is_zero() && self.omega.is_dealiased() && self.theta.is_dealiased()
    }

    /// Velocity components in spectral space.
    pub fn velocity(&self) -> Result<(SpectralField<T>, SpectralField<T>)> {
        biot_savart(&self.omega)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tendency<T: Real> {
    pub d_omega: SpectralField<T>,
    pub d_theta: SpectralField<T>,
}

/// Right-hand side evaluator with the Voigt multipliers tabulated once per grid.
#[derive(Debug, Clone)]
pub struct RhsOperator<T: Real> {
    grid: Arc<SpectralGrid<T>>,
    params: VoigtParams<T>,
    m_alpha: Vec<T>,
    m_beta: Vec<T>,
}

impl<T: Real> RhsOperator<T> {
    pub fn new(grid: &Arc<SpectralGrid<T>>, params: VoigtParams<T>) -> Self {
        let table = |exponent: T| {
            grid.kmag()
                .iter()
                .map(|&k| voigt_symbol(k, params.epsilon, exponent))
                .collect::<Vec<_>>()
        };
        Self {
            grid: Arc::clone(grid),
            params,
            m_alpha: table(params.alpha),
            m_beta: table(params.beta),
        }
    }

    pub fn params(&self) -> &VoigtParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &Arc<SpectralGrid<T>> {
        &self.grid
    }

    pub fn eval(&self, state: &State<T>) -> Result<Tendency<T>> {
        if state.grid().n() != self.grid.n() {
            return Err(Error::GridMismatch {
                expected: self.grid.n(),
                found: state.grid().n(),
            });
        }
        let grid = &self.grid;
        let (u1, u2) = biot_savart(&state.omega)?;
        let (u1p, u2p) = grid.inverse_pair(u1.coeffs(), u2.coeffs())?;
        let (wp, thp) = grid.inverse_pair(state.omega.coeffs(), state.theta.coeffs())?;
        let flux_w = flux_from_physical(grid, &u1p, &u2p, &wp)?;
        let flux_t = flux_from_physical(grid, &u1p, &u2p, &thp)?;

        let (k1, mask) = (grid.k1(), grid.mask());
        let theta = state.theta.coeffs();
        let d_omega = flux_w.map_modes(|i, fw| {
            if !mask[i] {
                return Complex::zero();
            }
            let th = theta[i].scale(k1[i]);
            // -flux + i k1 theta
            Complex::new(-fw.re - th.im, -fw.im + th.re).scale(self.m_alpha[i])
        });
        let d_theta = flux_t.map_modes(|i, ft| ft.scale(-self.m_beta[i]));

        if !d_omega.is_finite() || !d_theta.is_finite() {
            return Err(Error::NonFinite {
                last_good_t: state.t.as_f64(),
            });
        }
        Ok(Tendency { d_omega, d_theta })
    }

    /// Buoyancy forcing `(I + eps Lambda)^{-alpha} d_1 theta`.
    pub fn buoyancy(&self, theta: &SpectralField<T>) -> SpectralField<T> {
        let (k1, mask) = (self.grid.k1(), self.grid.mask());
        theta.map_modes(|i, c| {
            if !mask[i] {
                return Complex::zero();
            }
            let s = c.scale(k1[i] * self.m_alpha[i]);
            Complex::new(-s.im, s.re)
        })
    }
}

/// Time derivative of `(omega, theta)` at `state`.
pub fn rhs<T: Real>(state: &State<T>, params: &VoigtParams<T>) -> Result<Tendency<T>> {
    RhsOperator::new(state.grid(), *params).eval(state)
}

/// `(I + eps Lambda)^{-alpha} i k1 theta_hat`, zero mean by construction.
pub fn buoyancy_term<T: Real>(theta: &SpectralField<T>, params: &VoigtParams<T>) -> SpectralField<T> {
    RhsOperator::new(theta.grid(), *params).buoyancy(theta)
}
