//! Norms, conserved Voigt energies, a priori bound checks and the
//! Beale-Kato-Majda accumulator.
//!
//! All spectral norms are plain sums over coefficients: the `(2 pi)^2`
//! volume factor is dropped, so `||f||_{L^2}^2 = sum_k |f_hat(k)|^2`.

use serde::{Deserialize, Serialize};

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{SpectralField, VoigtParams};

/// Version of the [`DiagnosticsRecord`] layout. New fields are only ever appended.
pub const DIAGNOSTICS_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorms<T> {
    /// `(sum_k |k|^{2s} |f_hat|^2)^{1/2}`, the zero mode skipped.
    pub homogeneous: T,
    /// `(sum_k (1 + |k|)^{2s} |f_hat|^2)^{1/2}`.
    pub inhomogeneous: T,
}

pub fn sobolev_norm<T: Real>(f: &SpectralField<T>, s: T) -> SobolevNorms<T> {
    let kmag = f.grid().kmag();
    let two_s = s + s;
    let (mut hom, mut inh) = (T::zero(), T::zero());
    for (i, c) in f.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        if e == T::zero() {
            continue;
        }
        if i != 0 {
            hom = hom + kmag[i].powf(two_s) * e;
        }
        inh = inh + (T::one() + kmag[i]).powf(two_s) * e;
    }
    SobolevNorms {
        homogeneous: hom.sqrt(),
        inhomogeneous: inh.sqrt(),
    }
}

/// `sum_k (1 + eps |k|)^gamma |f_hat(k)|^2`.
pub fn weighted_energy<T: Real>(f: &SpectralField<T>, epsilon: T, gamma: T) -> T {
    let kmag = f.grid().kmag();
    f.coeffs().iter().enumerate().fold(T::zero(), |acc, (i, c)| {
        let e = c.norm_sqr();
        if e == T::zero() {
            return acc;
        }
        let w = if epsilon == T::zero() || gamma == T::zero() {
            T::one()
        } else {
            (T::one() + epsilon * kmag[i]).powf(gamma)
        };
        acc + w * e
    })
}

/// Conserved temperature energy `Q_theta = sum (1 + eps|k|) |theta_hat|^2`.
pub fn voigt_theta_energy<T: Real>(theta: &SpectralField<T>, params: &VoigtParams<T>) -> T {
    weighted_energy(theta, params.epsilon, T::one())
}

/// Vorticity energy `Q_omega = sum (1 + eps|k|) |omega_hat|^2`, driven only by buoyancy.
pub fn voigt_omega_energy<T: Real>(omega: &SpectralField<T>, params: &VoigtParams<T>) -> T {
    weighted_energy(omega, params.epsilon, T::one())
}

/// `(sum (1+eps|k|)^beta |theta_hat|^2, sum (1+eps|k|)^alpha |omega_hat|^2)`.
pub fn fractional_invariants<T: Real>(state: &State<T>, params: &VoigtParams<T>) -> (T, T) {
    (
        weighted_energy(&state.theta, params.epsilon, params.beta),
        weighted_energy(&state.omega, params.epsilon, params.alpha),
    )
}

/// `L^p` norm by uniform-weight quadrature on the grid (`p = inf` gives the grid maximum).
/// The weights are normalized so that a constant `c` has norm `|c|`.
pub fn lp_norm<T: Real>(f: &SpectralField<T>, p: f64) -> Result<T> {
    lp_norm_physical(&f.to_physical(), p)
}

pub fn lp_norm_physical<T: Real>(samples: &[T], p: f64) -> Result<T> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Precondition(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(samples.iter().fold(T::zero(), |m, x| m.max(x.abs())));
    }
    let pt = T::lit(p);
    let sum = samples.iter().fold(T::zero(), |acc, x| acc + x.abs().powf(pt));
    Ok((sum / T::lit(samples.len() as f64)).powf(T::one() / pt))
}

/// One time slice of every monitored quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub schema: u32,
    pub t: f64,
    pub l2_omega: f64,
    pub l2_theta: f64,
    pub h_half_omega: f64,
    pub h_half_theta: f64,
    pub q_theta: f64,
    pub q_omega: f64,
    pub frac_q_theta: f64,
    pub frac_q_omega: f64,
    pub max_omega: f64,
    pub max_theta: f64,
    pub max_u: f64,
    pub bkm_integral: f64,
    pub sobolev_s: Vec<f64>,
    pub hs_omega: Vec<f64>,
    pub hs_theta: Vec<f64>,
    /// Residual of the linear-growth bound; only present for classical runs at `eps = 1`.
    pub bound_slack: Option<f64>,
}

impl DiagnosticsRecord {
    /// `sup |omega| + sup |theta|`, the integrand of the BKM quantity.
    pub fn bkm_integrand(&self) -> f64 {
        self.max_omega + self.max_theta
    }
}

/// Trapezoid increment of `int (|omega|_inf + |theta|_inf) dt` between two records.
pub fn bkm_accumulate(prev: f64, before: &DiagnosticsRecord, now: &DiagnosticsRecord) -> Result<f64> {
    if !(now.t > before.t) {
        return Err(Error::Precondition(format!(
            "BKM accumulation needs increasing time, got {} then {}",
            before.t, now.t
        )));
    }
    Ok(prev + 0.5 * (now.t - before.t) * (before.bkm_integrand() + now.bkm_integrand()))
}

/// Slack allowed by [`check_growth_bound`].
pub fn growth_bound_slack(omega0_h_half: f64) -> f64 {
    1e-6 * (1.0 + omega0_h_half)
}

fn bound_applies<T: Real>(params: &VoigtParams<T>) -> bool {
    params.epsilon == T::one() && params.is_classical()
}

/// Residuals `||omega(t)||_{H^1/2} - ||omega_0||_{H^1/2} - t sqrt(A_0)` of the
/// linear-growth bound, using the inhomogeneous norm `Q_omega^{1/2}`.
///
/// The bound is only stated for the classical system at `eps = 1`; other
/// parameter sets are refused.
pub fn check_growth_bound<T: Real>(
    records: &[DiagnosticsRecord],
    a0: f64,
    omega0_h_half: f64,
    params: &VoigtParams<T>,
) -> Result<Vec<f64>> {
    if !bound_applies(params) {
        return Err(Error::Precondition(
            "growth bound is only checked for eps = 1, alpha = beta = 1".into(),
        ));
    }
    let t0 = records.first().map_or(0.0, |r| r.t);
    Ok(records
        .iter()
        .map(|r| r.q_omega.sqrt() - omega0_h_half - (r.t - t0) * a0.sqrt())
        .collect())
}

/// Builds [`DiagnosticsRecord`]s along a trajectory and accumulates the BKM integral.
#[derive(Debug, Clone)]
pub struct DiagnosticsTracker<T: Real> {
    params: VoigtParams<T>,
    sobolev_s: Vec<f64>,
    previous: Option<DiagnosticsRecord>,
    bkm: f64,
    /// `(t0, A_0, ||omega_0||_{H^1/2})` once the first record has been taken.
    initial: Option<(f64, f64, f64)>,
}

impl<T: Real> DiagnosticsTracker<T> {
    pub fn new(params: VoigtParams<T>, sobolev_s: Vec<f64>) -> Self {
        Self {
            params,
            sobolev_s,
            previous: None,
            bkm: 0.0,
            initial: None,
        }
    }

    pub fn bkm_integral(&self) -> f64 {
        self.bkm
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.previous.as_ref()
    }

    pub fn record(&mut self, state: &State<T>) -> Result<DiagnosticsRecord> {
        let params = &self.params;
        let half = T::lit(0.5);
        let (hs_omega, hs_theta): (Vec<f64>, Vec<f64>) = self
            .sobolev_s
            .iter()
            .map(|&s| {
                (
                    sobolev_norm(&state.omega, T::lit(s)).inhomogeneous.as_f64(),
                    sobolev_norm(&state.theta, T::lit(s)).inhomogeneous.as_f64(),
                )
            })
            .unzip();
        let (frac_q_theta, frac_q_omega) = fractional_invariants(state, params);
        let grid = state.grid();
        let (wp, thp) = grid.inverse_pair(state.omega.coeffs(), state.theta.coeffs())?;
        let q_omega = voigt_omega_energy(&state.omega, params).as_f64();
        let q_theta = voigt_theta_energy(&state.theta, params).as_f64();

        let mut rec = DiagnosticsRecord {
            schema: DIAGNOSTICS_SCHEMA,
            t: state.t.as_f64(),
            l2_omega: state.omega.l2_norm().as_f64(),
            l2_theta: state.theta.l2_norm().as_f64(),
            h_half_omega: sobolev_norm(&state.omega, half).homogeneous.as_f64(),
            h_half_theta: sobolev_norm(&state.theta, half).homogeneous.as_f64(),
            q_theta,
            q_omega,
            frac_q_theta: frac_q_theta.as_f64(),
            frac_q_omega: frac_q_omega.as_f64(),
            max_omega: lp_norm_physical(&wp, f64::INFINITY)?.as_f64(),
            max_theta: lp_norm_physical(&thp, f64::INFINITY)?.as_f64(),
            max_u: crate::timestepper::max_speed(state)?.as_f64(),
            bkm_integral: 0.0,
            sobolev_s: self.sobolev_s.clone(),
            hs_omega,
            hs_theta,
            bound_slack: None,
        };
        if let Some(prev) = &self.previous {
            self.bkm = bkm_accumulate(self.bkm, prev, &rec)?;
        }
        rec.bkm_integral = self.bkm;

        let &mut (t0, a0, w0) = self
            .initial
            .get_or_insert((rec.t, q_theta, q_omega.sqrt()));
        if bound_applies(params) {
            rec.bound_slack = Some(q_omega.sqrt() - w0 - (rec.t - t0) * a0.sqrt());
        }
        self.previous = Some(rec.clone());
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn record_at(t: f64, integrand: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            schema: DIAGNOSTICS_SCHEMA,
            t,
            l2_omega: 0.0,
            l2_theta: 0.0,
            h_half_omega: 0.0,
            h_half_theta: 0.0,
            q_theta: 0.0,
            q_omega: 0.0,
            frac_q_theta: 0.0,
            frac_q_omega: 0.0,
            max_omega: integrand,
            max_theta: 0.0,
            max_u: 0.0,
            bkm_integral: 0.0,
            sobolev_s: vec![],
            hs_omega: vec![],
            hs_theta: vec![],
            bound_slack: None,
        }
    }

    #[test]
    fn sobolev_examples() {
        let g = make_grid::<f64>(16).unwrap();
        let f = SpectralField::from_fn(&g, |x1, _| x1.sin()).unwrap();
        let n0 = sobolev_norm(&f, 0.0);
        assert!((n0.inhomogeneous - SQRT_HALF).abs() < 1e-15);
        assert!((n0.homogeneous - SQRT_HALF).abs() < 1e-15);
        assert!((sobolev_norm(&f, 0.5).homogeneous - SQRT_HALF).abs() < 1e-15);
        let f2 = SpectralField::from_fn(&g, |x1, _| (2.0 * x1).sin()).unwrap();
        assert!((sobolev_norm(&f2, 1.0).homogeneous - 2.0 * SQRT_HALF).abs() < 1e-15);
        // homogeneous norm skips the mean even for s < 0
        let c = SpectralField::from_fn(&g, |_, _| 1.0).unwrap();
        assert_eq!(sobolev_norm(&c, -1.0).homogeneous, 0.0);
        assert!((sobolev_norm(&c, -1.0).inhomogeneous - 1.0).abs() < 1e-15);
    }

    #[test]
    fn voigt_energies() {
        let g = make_grid::<f64>(16).unwrap();
        let zero = SpectralField::zeros(&g);
        let p1 = VoigtParams::classical(1.0).unwrap();
        let p0 = VoigtParams::boussinesq();
        assert_eq!(voigt_theta_energy(&zero, &p1), 0.0);
        assert_eq!(voigt_omega_energy(&zero, &p1), 0.0);
        let f = SpectralField::from_fn(&g, |x1, _| x1.sin()).unwrap();
        assert!((voigt_theta_energy(&f, &p1) - 1.0).abs() < 1e-15);
        assert!((voigt_theta_energy(&f, &p0) - 0.5).abs() < 1e-15);
        assert!((voigt_omega_energy(&f, &p1) - 1.0).abs() < 1e-15);
        assert!((voigt_omega_energy(&f, &p0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fractional_examples() {
        let g = make_grid::<f64>(16).unwrap();
        let th = SpectralField::from_fn(&g, |x1, _| x1.sin()).unwrap();
        let s = State::new(SpectralField::zeros(&g), th.clone(), 0.0).unwrap();
        let (fq, _) = fractional_invariants(&s, &VoigtParams::new(1.0, 2.5, 0.0).unwrap());
        assert!((fq - th.l2_norm().powi(2)).abs() < 1e-15);
        let (fq, _) = fractional_invariants(&s, &VoigtParams::new(1.0, 4.0 / 3.0, 2.0 / 3.0).unwrap());
        assert!((fq - 0.5 * 2f64.powf(2.0 / 3.0)).abs() < 1e-15);
        // classical exponent reproduces Q_theta
        let p = VoigtParams::classical(0.7).unwrap();
        assert!((fractional_invariants(&s, &p).0 - voigt_theta_energy(&th, &p)).abs() < 1e-15);
    }

    #[test]
    fn lp_examples() {
        let g = make_grid::<f64>(16).unwrap();
        let c = SpectralField::from_fn(&g, |_, _| -1.5).unwrap();
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((lp_norm(&c, p).unwrap() - 1.5).abs() < 1e-14);
        }
        let f = SpectralField::from_fn(&g, |x1, _| x1.sin()).unwrap();
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
        assert!((lp_norm(&f, 2.0).unwrap() - sobolev_norm(&f, 0.0).inhomogeneous).abs() < 1e-12);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn bkm_trapezoid() {
        let a = record_at(0.0, 0.0);
        let b = record_at(1.0, 0.0);
        assert_eq!(bkm_accumulate(0.0, &a, &b).unwrap(), 0.0);
        let a = record_at(0.5, 3.0);
        let b = record_at(0.75, 3.0);
        assert!((bkm_accumulate(1.0, &a, &b).unwrap() - 1.75).abs() < 1e-15);
        // linear integrand 2t on [0, 1] -> 1, exact
        let a = record_at(0.0, 0.0);
        let b = record_at(1.0, 2.0);
        assert!((bkm_accumulate(0.0, &a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(bkm_accumulate(0.0, &b, &a).is_err());
    }

    #[test]
    fn growth_bound_refuses_other_params() {
        let recs = vec![record_at(0.0, 0.0)];
        assert!(check_growth_bound(&recs, 1.0, 0.0, &VoigtParams::classical(0.5).unwrap()).is_err());
        assert!(check_growth_bound(&recs, 1.0, 0.0, &VoigtParams::new(1.0, 2.0, 1.0).unwrap()).is_err());
        let r = check_growth_bound(&recs, 1.0, 0.0, &VoigtParams::classical(1.0).unwrap()).unwrap();
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn tracker_rest_state() {
        let g = make_grid::<f64>(16).unwrap();
        let mut tr = DiagnosticsTracker::new(VoigtParams::classical(1.0).unwrap(), vec![1.5]);
        let mut s = State::rest(&g);
        let r0 = tr.record(&s).unwrap();
        s.t = 0.5;
        let r1 = tr.record(&s).unwrap();
        assert_eq!(r1.bkm_integral, 0.0);
        assert_eq!(r0.bound_slack, Some(0.0));
        assert_eq!(r1.q_theta, 0.0);
        assert_eq!(r1.hs_omega, vec![0.0]);
    }
}
