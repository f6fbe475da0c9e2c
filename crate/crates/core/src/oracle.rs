//! Independent references for the spectral core: a brute-force convolution of
//! the nonlinear flux and closed-form single-mode tendencies.
//!
//! Nothing here calls into the FFT path; the oracle works on a dense table of
//! Fourier modes and sums over all pairs directly.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::Tendency;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{
    biot_savart, divergence_flux, SpectralField, SpectralGrid, VoigtParams, Wavenumber,
};

/// Largest support radius accepted by the oracle.
pub const MAX_ORACLE_RADIUS: i64 = 8;

/// Dense coefficient table over `|k1|, |k2| <= radius`, no dealias mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseModeArray<T: Real> {
    radius: i64,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseModeArray<T> {
    pub fn zeros(radius: i64) -> Result<Self> {
        if !(0..=MAX_ORACLE_RADIUS).contains(&radius) {
            return Err(Error::Precondition(format!(
                "oracle support radius {radius} outside [0, {MAX_ORACLE_RADIUS}]"
            )));
        }
        let side = (2 * radius + 1) as usize;
        Ok(Self {
            radius,
            data: vec![Complex::zero(); side * side],
        })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    fn index(&self, k: Wavenumber) -> Option<usize> {
        let r = self.radius;
        if k.k1.abs() > r || k.k2.abs() > r {
            return None;
        }
        Some(((k.k1 + r) * (2 * r + 1) + (k.k2 + r)) as usize)
    }

    pub fn get(&self, k: Wavenumber) -> Complex<T> {
        self.index(k).map_or_else(Complex::zero, |i| self.data[i])
    }

    /// Sets `k` and its Hermitian partner `-k`.
    pub fn set(&mut self, k: Wavenumber, value: Complex<T>) -> Result<()> {
        let i = self
            .index(k)
            .ok_or_else(|| Error::Precondition(format!("{k:?} outside oracle support")))?;
        let j = self.index(k.neg()).expect("support is symmetric");
        if i == j {
            self.data[i] = Complex::new(value.re, T::zero());
        } else {
            self.data[i] = value;
            self.data[j] = value.conj();
        }
        Ok(())
    }

    fn modes(&self) -> impl Iterator<Item = (Wavenumber, Complex<T>)> + '_ {
        let r = self.radius;
        (-r..=r)
            .flat_map(move |k1| (-r..=r).map(move |k2| Wavenumber::new(k1, k2)))
            .zip(self.data.iter().copied())
    }

    /// Copies the modes of `field` inside the support; fails if anything nonzero lies outside.
    pub fn from_field(field: &SpectralField<T>, radius: i64) -> Result<Self> {
        let mut out = Self::zeros(radius)?;
        let grid = field.grid();
        for (i, c) in field.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = grid.wavenumber_at(i);
            match out.index(k) {
                Some(j) => out.data[j] = *c,
                None => {
                    return Err(Error::Precondition(format!(
                        "field has a nonzero mode {k:?} outside radius {radius}"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn to_field(&self, grid: &Arc<SpectralGrid<T>>) -> Result<SpectralField<T>> {
        let mut f = SpectralField::zeros(grid);
        for (k, c) in self.modes() {
            if c.is_zero() {
                continue;
            }
            let idx = grid
                .index_of(k)
                .ok_or_else(|| Error::Precondition(format!("{k:?} not on the N={} lattice", grid.n())))?;
            f.coeffs_mut()[idx] = c;
        }
        Ok(f)
    }

    pub fn zero_mode(&self) -> Complex<T> {
        self.get(Wavenumber::new(0, 0))
    }
}

/// `(div(u f))_k = sum_{p+q=k} i k . u_hat(p) f_hat(q)` by direct enumeration of
/// all mode pairs, kept only for `|k1|, |k2| <= keep`.
pub fn convolution_flux_direct<T: Real>(
    u1: &DenseModeArray<T>,
    u2: &DenseModeArray<T>,
    f: &DenseModeArray<T>,
    keep: i64,
) -> Result<DenseModeArray<T>> {
    let mut out = DenseModeArray::zeros(keep)?;
    for (p, a1) in u1.modes() {
        let a2 = u2.get(p);
        if a1.is_zero() && a2.is_zero() {
            continue;
        }
        for (q, b) in f.modes() {
            if b.is_zero() {
                continue;
            }
            let k = Wavenumber::new(p.k1 + q.k1, p.k2 + q.k2);
            if let Some(idx) = out.index(k) {
                let kdotu = a1.scale(T::lit(k.k1 as f64)) + a2.scale(T::lit(k.k2 as f64));
                out.data[idx] = out.data[idx] + Complex::<T>::i() * kdotu * b;
            }
        }
    }
    Ok(out)
}

/// Closed-form tendency for `u = 0` and temperature a single real mode with
/// `theta_hat(k0) = amplitude`: only `d_omega` at `+-k0` is nonzero, equal to
/// `(1 + eps|k0|)^{-alpha} i k0_1 theta_hat(+-k0)`.
pub fn single_mode_tendency<T: Real>(
    grid: &Arc<SpectralGrid<T>>,
    k0: Wavenumber,
    amplitude: Complex<T>,
    params: &VoigtParams<T>,
) -> Result<Tendency<T>> {
    let mut d_omega = SpectralField::zeros(grid);
    let m = if params.epsilon == T::zero() {
        T::one()
    } else {
        (T::one() + params.epsilon * k0.norm::<T>()).powf(-params.alpha)
    };
    let value = Complex::new(T::zero(), T::lit(k0.k1 as f64) * m) * amplitude;
    d_omega.set_mode(k0, value)?;
    Ok(Tendency {
        d_omega,
        d_theta: SpectralField::zeros(grid),
    })
}

/// Outcome of [`oracle_agreement`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub n: usize,
    pub cases: usize,
    /// Largest mode-wise discrepancy over all cases.
    pub max_error: f64,
    /// `max |oracle_k=0|` over all cases; zero when the oracle is consistent.
    pub max_zero_mode: f64,
}

/// Compares `divergence_flux` against the direct convolution for `cases` random
/// band-limited states on an `N x N` grid. Velocity and scalar are each scaled
/// to unit `L^2` norm; the velocity comes from a random vorticity, so it is divergence-free.
pub fn oracle_agreement(n: usize, cases: usize, seed: u64) -> Result<OracleReport> {
    let grid = crate::spectral::make_grid::<f64>(n)?;
    let k = grid.cutoff();
    if k > MAX_ORACLE_RADIUS {
        return Err(Error::Precondition(format!(
            "grid N={n} has dealias radius {k} > {MAX_ORACLE_RADIUS}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport { n, cases, max_error: 0.0, max_zero_mode: 0.0 };
    for _ in 0..cases {
        let omega = random_field(&grid, &mut rng, k, true);
        let f = random_field(&grid, &mut rng, k, false);
        let (u1, u2) = biot_savart(&omega)?;
        let unorm = (u1.l2_norm().powi(2) + u2.l2_norm().powi(2)).sqrt();
        let (u1, u2) = (u1.scaled(1.0 / unorm), u2.scaled(1.0 / unorm));
        let f = f.scaled(1.0 / f.l2_norm());

        let spectral = divergence_flux(&u1, &u2, &f)?;
        let direct = convolution_flux_direct(
            &DenseModeArray::from_field(&u1, k)?,
            &DenseModeArray::from_field(&u2, k)?,
            &DenseModeArray::from_field(&f, k)?,
            k,
        )?;
        report.max_zero_mode = report.max_zero_mode.max(direct.zero_mode().norm());
        let direct = direct.to_field(&grid)?;
        report.max_error = report.max_error.max(spectral.sub(&direct).max_coeff());
    }
    Ok(report)
}

fn random_field(grid: &Arc<SpectralGrid<f64>>, rng: &mut ChaCha8Rng, k: i64, zero_mean: bool) -> SpectralField<f64> {
    let mut f = SpectralField::zeros(grid);
    for k1 in 0..=k {
        for k2 in -k..=k {
            if k1 == 0 && k2 < 0 || (zero_mean && k1 == 0 && k2 == 0) {
                continue;
            }
            let c = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            f.set_mode(Wavenumber::new(k1, k2), c).expect("mode inside the lattice");
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn zero_scalar_gives_zero() {
        let mut u1 = DenseModeArray::<f64>::zeros(3).unwrap();
        u1.set(Wavenumber::new(1, 2), Complex::new(0.5, 0.1)).unwrap();
        let u2 = DenseModeArray::zeros(3).unwrap();
        let f = DenseModeArray::zeros(3).unwrap();
        let out = convolution_flux_direct(&u1, &u2, &f, 3).unwrap();
        assert!(out.data.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn single_pair_product() {
        // u1 = a e^{ip.x} + c.c., f = b e^{iq.x} + c.c.; output at p+q is i (p+q)_1 a b
        let p = Wavenumber::new(1, 0);
        let q = Wavenumber::new(0, 2);
        let a = Complex::new(0.3f64, -0.2);
        let b = Complex::new(-0.1f64, 0.4);
        let mut u1 = DenseModeArray::<f64>::zeros(4).unwrap();
        u1.set(p, a).unwrap();
        let u2 = DenseModeArray::zeros(4).unwrap();
        let mut f = DenseModeArray::zeros(4).unwrap();
        f.set(q, b).unwrap();
        let out = convolution_flux_direct(&u1, &u2, &f, 4).unwrap();
        let expected: Complex<f64> = Complex::<f64>::i() * a * b; // (p+q)_1 = 1
        assert!((out.get(Wavenumber::new(1, 2)) - expected).norm() < 1e-16);
        assert!((out.get(Wavenumber::new(-1, -2)) - expected.conj()).norm() < 1e-16);
        // p - q partner: i (p-q)_1 a conj(b)
        let pm: Complex<f64> = Complex::<f64>::i() * a * b.conj();
        assert!((out.get(Wavenumber::new(1, -2)) - pm).norm() < 1e-16);
        let nonzero = out.data.iter().filter(|c| !c.is_zero()).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn cost_guard() {
        assert!(DenseModeArray::<f64>::zeros(9).is_err());
        assert!(oracle_agreement(32, 1, 0).is_err());
    }

    #[test]
    fn agreement_small() {
        let r = oracle_agreement(16, 5, 42).unwrap();
        assert!(r.max_error < 1e-12, "{r:?}");
        assert_eq!(r.max_zero_mode, 0.0);
    }

    #[test]
    fn single_mode_cases() {
        let g = make_grid::<f64>(16).unwrap();
        let sin_amp = Complex::new(0.0, -0.5);
        let t = single_mode_tendency(&g, Wavenumber::new(1, 0), sin_amp, &VoigtParams::classical(1.0).unwrap()).unwrap();
        let expected = SpectralField::from_fn(&g, |x1, _| 0.5 * x1.cos()).unwrap();
        assert!(t.d_omega.sub(&expected).max_coeff() < 1e-16);
        assert_eq!(t.d_theta.max_coeff(), 0.0);

        let t = single_mode_tendency(&g, Wavenumber::new(0, 1), sin_amp, &VoigtParams::classical(1.0).unwrap()).unwrap();
        assert_eq!(t.d_omega.max_coeff(), 0.0);

        let t = single_mode_tendency(&g, Wavenumber::new(2, 1), Complex::new(0.3, 0.1), &VoigtParams::boussinesq()).unwrap();
        let theta = {
            let mut f = SpectralField::zeros(&g);
            f.set_mode(Wavenumber::new(2, 1), Complex::new(0.3, 0.1)).unwrap();
            f
        };
        // d_1 theta exactly
        let d1 = theta.map_modes(|i, c| Complex::<f64>::i() * c * g.k1()[i]);
        assert!(t.d_omega.sub(&d1).max_coeff() < 1e-16);
    }
}
