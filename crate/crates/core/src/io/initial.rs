//! Built-in initial data families.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{SpectralField, SpectralGrid, Wavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Omega,
    Theta,
}

/// Initial-data family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `amp * sin(k . x)` in one field, the other at rest.
    SingleMode { k: [i64; 2], amp: f64, field: FieldKind },
    /// `omega = A sin x1 sin x2`, `theta = A cos x1`.
    TaylorGreen { amp: f64 },
    /// Both fields with `|f_hat(k)| = c (1 + |k|)^{-decay}` for `0 < |k| <= kmax`,
    /// phases drawn from a ChaCha8 stream seeded by `seed`, each field scaled to unit `L^2` norm.
    RandomBandlimited { kmax: i64, decay: f64, seed: u64 },
}

/// Smallest spectral decay accepted for random data.
pub const MIN_DECAY: f64 = 4.0;

impl InitialData {
    pub fn seed(&self) -> Option<u64> {
        match self {
            InitialData::RandomBandlimited { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        if let InitialData::RandomBandlimited { seed, .. } = &mut self {
            *seed = new_seed;
        }
        self
    }

    /// Checks the family parameters against a grid with dealias radius `cutoff`.
    pub fn validate(&self, cutoff: i64) -> Result<()> {
        match *self {
            InitialData::SingleMode { k, amp, .. } => {
                let k = Wavenumber::new(k[0], k[1]);
                if k.is_zero() {
                    return Err(Error::config("initial.k", "wavenumber must be nonzero"));
                }
                if k.k1.abs() > cutoff || k.k2.abs() > cutoff {
                    return Err(Error::config(
                        "initial.k",
                        format!("{k:?} lies outside the dealias mask |k_i| <= {cutoff}"),
                    ));
                }
                finite("initial.amp", amp)
            }
            InitialData::TaylorGreen { amp } => {
                if cutoff < 1 {
                    return Err(Error::config("initial.family", "grid too coarse"));
                }
                finite("initial.amp", amp)
            }
            InitialData::RandomBandlimited { kmax, decay, .. } => {
                if kmax < 1 || kmax > cutoff {
                    return Err(Error::config(
                        "initial.kmax",
                        format!("must lie in [1, {cutoff}] for this grid, got {kmax}"),
                    ));
                }
                if !(decay >= MIN_DECAY) || !decay.is_finite() {
                    return Err(Error::config(
                        "initial.decay",
                        format!("must be finite and >= {MIN_DECAY}, got {decay}"),
                    ));
                }
                Ok(())
            }
        }
    }
}

fn finite(key: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, "must be finite"))
    }
}

/// Builds the initial [`State`] at `t = 0`. The vorticity mean is always zero.
pub fn make_initial_data<T: Real>(spec: &InitialData, grid: &Arc<SpectralGrid<T>>) -> Result<State<T>> {
    spec.validate(grid.cutoff())?;
    let mut state = State::rest(grid);
    match *spec {
        InitialData::SingleMode { k, amp, field } => {
            // amp sin(k.x) = amp/(2i) e^{ik.x} + c.c.
            let c = Complex::new(T::zero(), T::lit(-0.5 * amp));
            let target = match field {
                FieldKind::Omega => &mut state.omega,
                FieldKind::Theta => &mut state.theta,
            };
            target.set_mode(Wavenumber::new(k[0], k[1]), c)?;
        }
        InitialData::TaylorGreen { amp } => {
            // sin x1 sin x2 = -(1/4)(e^{i(x1+x2)} - e^{i(x1-x2)} + c.c.)
            let q = T::lit(0.25 * amp);
            state.omega.set_mode(Wavenumber::new(1, 1), Complex::new(-q, T::zero()))?;
            state.omega.set_mode(Wavenumber::new(1, -1), Complex::new(q, T::zero()))?;
            state.theta.set_mode(Wavenumber::new(1, 0), Complex::new(q + q, T::zero()))?;
        }
        InitialData::RandomBandlimited { kmax, decay, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            fill_random(&mut state.omega, &mut rng, kmax, decay)?;
            fill_random(&mut state.theta, &mut rng, kmax, decay)?;
        }
    }
    Ok(state)
}

fn fill_random<T: Real>(f: &mut SpectralField<T>, rng: &mut ChaCha8Rng, kmax: i64, decay: f64) -> Result<()> {
    for k1 in 0..=kmax {
        for k2 in -kmax..=kmax {
            if k1 == 0 && k2 <= 0 || k1 * k1 + k2 * k2 > kmax * kmax {
                continue;
            }
            let k = Wavenumber::new(k1, k2);
            let amp = (1.0 + k.norm::<f64>()).powf(-decay);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            f.set_mode(k, Complex::new(T::lit(amp * phase.cos()), T::lit(amp * phase.sin())))?;
        }
    }
    let norm = f.l2_norm();
    if norm > T::zero() {
        *f = f.scaled(T::one() / norm);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn single_mode_theta_is_sine() {
        let g = make_grid::<f64>(16).unwrap();
        let spec = InitialData::SingleMode { k: [1, 0], amp: 1.0, field: FieldKind::Theta };
        let s = make_initial_data(&spec, &g).unwrap();
        let expected = SpectralField::from_fn(&g, |x1, _| x1.sin()).unwrap();
        assert!(s.theta.sub(&expected).max_coeff() < 1e-16);
        assert_eq!(s.omega.max_coeff(), 0.0);
        assert!(s.satisfies_invariants());
    }

    #[test]
    fn taylor_green_matches_samples() {
        let g = make_grid::<f64>(16).unwrap();
        let s = make_initial_data(&InitialData::TaylorGreen { amp: 1.0 }, &g).unwrap();
        let w = SpectralField::from_fn(&g, |x1, x2| x1.sin() * x2.sin()).unwrap();
        let th = SpectralField::from_fn(&g, |x1, _| x1.cos()).unwrap();
        assert!(s.omega.sub(&w).max_coeff() < 1e-16);
        assert!(s.theta.sub(&th).max_coeff() < 1e-16);
        // four modes of modulus 1/4
        assert!((s.omega.l2_norm() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let g = make_grid::<f64>(32).unwrap();
        let spec = InitialData::RandomBandlimited { kmax: 8, decay: 4.0, seed: 7 };
        let a = make_initial_data(&spec, &g).unwrap();
        let b = make_initial_data(&spec, &g).unwrap();
        assert_eq!(a, b);
        assert!(a.satisfies_invariants());
        assert!((a.omega.l2_norm() - 1.0).abs() < 1e-14);
        assert!((a.theta.l2_norm() - 1.0).abs() < 1e-14);
        assert_eq!(a.omega.hermitian_defect(), 0.0);
        let c = make_initial_data(&spec.clone().with_seed(8), &g).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = make_grid::<f64>(16).unwrap();
        let too_big = InitialData::RandomBandlimited { kmax: 6, decay: 5.0, seed: 1 };
        assert!(matches!(make_initial_data(&too_big, &g), Err(Error::Config { key, .. }) if key == "initial.kmax"));
        let rough = InitialData::RandomBandlimited { kmax: 3, decay: 2.0, seed: 1 };
        assert!(matches!(make_initial_data(&rough, &g), Err(Error::Config { key, .. }) if key == "initial.decay"));
        let outside = InitialData::SingleMode { k: [8, 0], amp: 1.0, field: FieldKind::Omega };
        assert!(make_initial_data(&outside, &g).is_err());
    }
}
