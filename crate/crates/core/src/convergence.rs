//! Vanishing-regularization experiments and the fractional regime map.
//!
//! Every run here uses fixed-step RK4, so the Voigt run and the `eps = 0`
//! reference share one time grid and their difference isolates the effect of
//! the regularization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsTracker;
use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{biot_savart, SpectralField, VoigtParams};
use crate::timestepper::{integrate, Cadence, StepControl};

/// Largest tail-to-peak coefficient ratio accepted for the reference run.
pub const TAIL_TOLERANCE: f64 = 1e-10;
/// Accepted window for the mean `e_max` ratio under `eps` halving.
pub const RATE_WINDOW: (f64, f64) = (0.35, 0.75);
const REGIME_TOL: f64 = 1e-12;

/// Shared settings of a Voigt/reference pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Snapshot cadence in steps; the final time is always included.
    pub output_every: u64,
}

impl PairConfig {
    fn control<T: Real>(&self) -> Result<StepControl<T>> {
        let c = StepControl::fixed(T::lit(self.dt), T::lit(self.t_end))
            .with_cadence(Cadence::EverySteps(self.output_every));
        c.validate()?;
        Ok(c)
    }
}

/// Time series of the difference between a Voigt run and the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSeries {
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// `|u|^2 + |theta|^2 + eps (|u|_{H^1/2}^2 + |theta|_{H^1/2}^2)` of the differences.
    pub energy: Vec<f64>,
    /// `||u_V - u_B||_{L^2}`, equivalent to the `H^{-1}` distance of the vorticities.
    pub velocity_l2: Vec<f64>,
    pub theta_l2: Vec<f64>,
}

impl PairSeries {
    pub fn e_max(&self) -> f64 {
        self.energy.iter().copied().fold(0.0, f64::max)
    }

    /// `max_t (||u_V - u_B|| + ||theta_V - theta_B||)`.
    pub fn metric_max(&self) -> f64 {
        self.velocity_l2
            .iter()
            .zip(&self.theta_l2)
            .map(|(u, t)| u + t)
            .fold(0.0, f64::max)
    }
}

/// Classical parameters `(eps, 1, 1)`; `eps = 0` gives the unregularized system.
fn pair_params<T: Real>(epsilon: f64) -> Result<VoigtParams<T>> {
    VoigtParams::classical(T::lit(epsilon))
}

/// Fixed-step trajectory sampled at the cadence of `cfg`.
pub fn trajectory<T: Real>(state0: &State<T>, params: &VoigtParams<T>, cfg: &PairConfig) -> Result<Vec<State<T>>> {
    let control = cfg.control::<T>()?;
    let mut snaps = Vec::new();
    integrate(state0.clone(), &control, params, |s| {
        snaps.push(s.clone());
        Ok(())
    })?;
    Ok(snaps)
}

fn difference_measures<T: Real>(
    voigt: &State<T>,
    reference: &State<T>,
    epsilon: f64,
) -> Result<(f64, f64, f64)> {
    let grid = voigt.grid();
    if grid.n() != reference.grid().n() {
        return Err(Error::GridMismatch {
            expected: reference.grid().n(),
            found: grid.n(),
        });
    }
    let dw = voigt.omega.sub(&reference.omega);
    let dth = voigt.theta.sub(&reference.theta);
    let (u1, u2) = biot_savart(&dw)?;
    let kmag = grid.kmag();
    let l2 = |f: &SpectralField<T>| f.weighted_inner(f, |_| T::one()).as_f64();
    let h_half = |f: &SpectralField<T>| f.weighted_inner(f, |i| kmag[i]).as_f64();
    let u_sq = l2(&u1) + l2(&u2);
    let th_sq = l2(&dth);
    let energy = u_sq + th_sq + epsilon * (h_half(&u1) + h_half(&u2) + h_half(&dth));
    Ok((energy, u_sq.sqrt(), th_sq.sqrt()))
}

fn series_from<T: Real>(epsilon: f64, voigt: &[State<T>], reference: &[State<T>]) -> Result<PairSeries> {
    if voigt.len() != reference.len() {
        return Err(Error::Precondition(format!(
            "time grids differ: {} vs {} snapshots",
            voigt.len(),
            reference.len()
        )));
    }
    let mut out = PairSeries {
        epsilon,
        times: Vec::with_capacity(voigt.len()),
        energy: Vec::with_capacity(voigt.len()),
        velocity_l2: Vec::with_capacity(voigt.len()),
        theta_l2: Vec::with_capacity(voigt.len()),
    };
    for (v, r) in voigt.iter().zip(reference) {
        if v.t != r.t {
            return Err(Error::Precondition(format!("snapshot times differ: {} vs {}", v.t, r.t)));
        }
        let (e, u, th) = difference_measures(v, r, epsilon)?;
        out.times.push(v.t.as_f64());
        out.energy.push(e);
        out.velocity_l2.push(u);
        out.theta_l2.push(th);
    }
    Ok(out)
}

/// Integrates the Voigt system at `epsilon` and the unregularized reference from
/// the same data on the same time grid and returns the difference series.
pub fn run_pair<T: Real>(epsilon: f64, state0: &State<T>, cfg: &PairConfig) -> Result<PairSeries> {
    let reference = trajectory(state0, &pair_params::<T>(0.0)?, cfg)?;
    let voigt = trajectory(state0, &pair_params::<T>(epsilon)?, cfg)?;
    series_from(epsilon, &voigt, &reference)
}

/// Largest ratio, over the snapshots, of the biggest coefficient on the outermost
/// retained shell `max(|k1|, |k2|) = K` to the biggest coefficient overall.
pub fn spectral_tail_ratio<T: Real>(snapshots: &[State<T>]) -> f64 {
    let mut worst = 0.0f64;
    for s in snapshots {
        let grid = s.grid();
        let k = grid.cutoff();
        for f in [&s.omega, &s.theta] {
            let mut peak = 0.0f64;
            let mut tail = 0.0f64;
            for (i, c) in f.coeffs().iter().enumerate() {
                let a = c.norm().as_f64();
                peak = peak.max(a);
                let w = grid.wavenumber_at(i);
                if w.k1.abs().max(w.k2.abs()) == k {
                    tail = tail.max(a);
                }
            }
            if peak > 0.0 {
                worst = worst.max(tail / peak);
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    pub e_max: Vec<f64>,
    /// `e_max[i + 1] / e_max[i]`.
    pub rates: Vec<f64>,
    pub time_grid: Vec<f64>,
    pub metric_max: Vec<f64>,
    pub tail_ratio: f64,
    pub mean_rate: Option<f64>,
    pub e_max_decreasing: bool,
    pub metric_decreasing: bool,
    /// `None` for a single-`eps` sweep.
    pub pass: Option<bool>,
    pub series: Vec<PairSeries>,
}

impl ConvergenceReport {
    pub fn tail_resolved(&self) -> bool {
        self.tail_ratio < TAIL_TOLERANCE
    }
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))
}

/// Runs [`run_pair`] for every `eps` with one shared reference trajectory.
pub fn sweep_epsilon<T: Real>(
    state0: &State<T>,
    cfg: &PairConfig,
    epsilons: &[f64],
    workers: usize,
) -> Result<ConvergenceReport> {
    if epsilons.is_empty() {
        return Err(Error::config("sweep.epsilons", "empty list"));
    }
    if let Some(bad) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::config("sweep.epsilons", format!("entries must be positive, got {bad}")));
    }
    if !strictly_decreasing(epsilons) {
        return Err(Error::config("sweep.epsilons", "must be strictly decreasing"));
    }
    let pool = pool(workers)?;
    let reference = trajectory(state0, &pair_params::<T>(0.0)?, cfg)?;
    let tail_ratio = spectral_tail_ratio(&reference);
    log::info!("reference run done, tail ratio {tail_ratio:.3e}");

    let series: Vec<PairSeries> = pool.install(|| {
        epsilons
            .par_iter()
            .map(|&eps| {
                let voigt = trajectory(state0, &pair_params::<T>(eps)?, cfg)?;
                let s = series_from(eps, &voigt, &reference)?;
                log::info!("eps = {eps}: e_max = {:.6e}", s.e_max());
                Ok(s)
            })
            .collect::<Result<_>>()
    })?;

    let e_max: Vec<f64> = series.iter().map(PairSeries::e_max).collect();
    let metric_max: Vec<f64> = series.iter().map(PairSeries::metric_max).collect();
    let rates: Vec<f64> = e_max.windows(2).map(|w| w[1] / w[0]).collect();
    let mean_rate = (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64);
    let e_max_decreasing = strictly_decreasing(&e_max);
    let pass = mean_rate.map(|m| e_max_decreasing && (RATE_WINDOW.0..=RATE_WINDOW.1).contains(&m));
    Ok(ConvergenceReport {
        epsilons: epsilons.to_vec(),
        e_max,
        rates,
        time_grid: series[0].times.clone(),
        metric_decreasing: strictly_decreasing(&metric_max),
        metric_max,
        tail_ratio,
        mean_rate,
        e_max_decreasing,
        pass,
        series,
    })
}

/// Whether global regularity is known for an exponent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    Proven,
    Conjectural,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeLabel::Proven => "proven",
            RegimeLabel::Conjectural => "conjectural",
        }
    }
}

/// Proven for the classical pair `alpha = beta = 1`, when `alpha + beta >= 2,
/// alpha > 1, beta >= 2/3`, and when `alpha > 2, beta = 0`. Comparisons allow a
/// `1e-12` rounding margin so that `4/3 + 2/3` counts as 2.
pub fn regime_label(alpha: f64, beta: f64) -> RegimeLabel {
    let ge = |a: f64, b: f64| a >= b - REGIME_TOL;
    let gt = |a: f64, b: f64| a > b + REGIME_TOL;
    let mixed = ge(alpha + beta, 2.0) && gt(alpha, 1.0) && ge(beta, 2.0 / 3.0);
    let transport = gt(alpha, 2.0) && beta.abs() <= REGIME_TOL;
    let classical = (alpha - 1.0).abs() <= REGIME_TOL && (beta - 1.0).abs() <= REGIME_TOL;
    if classical || mixed || transport {
        RegimeLabel::Proven
    } else {
        RegimeLabel::Conjectural
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCell {
    pub alpha: f64,
    pub beta: f64,
    pub label: RegimeLabel,
    pub completed: bool,
    pub bkm_value: f64,
    pub max_hs_omega: f64,
    /// Time of the last finite state when the run aborted.
    pub abort_time: Option<f64>,
    pub abort_reason: Option<String>,
}

/// One `eps = 1` run per `(alpha, beta)` cell. A failing cell is recorded and the
/// remaining cells still run.
pub fn regime_matrix<T: Real>(
    state0: &State<T>,
    control: &StepControl<T>,
    cells: &[(f64, f64)],
    sobolev_s: f64,
    workers: usize,
) -> Result<Vec<RegimeCell>> {
    control.validate()?;
    if !(sobolev_s > 1.0) {
        return Err(Error::config("regimes.sobolev_s", format!("must exceed 1, got {sobolev_s}")));
    }
    for &(a, b) in cells {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::config("regimes.cells", format!("exponents must be nonnegative, got ({a}, {b})")));
        }
    }
    let pool = pool(workers)?;
    Ok(pool.install(|| {
        cells
            .par_iter()
            .map(|&(alpha, beta)| regime_cell(state0, control, alpha, beta, sobolev_s))
            .collect()
    }))
}

fn regime_cell<T: Real>(
    state0: &State<T>,
    control: &StepControl<T>,
    alpha: f64,
    beta: f64,
    s: f64,
) -> RegimeCell {
    let mut cell = RegimeCell {
        alpha,
        beta,
        label: regime_label(alpha, beta),
        completed: false,
        bkm_value: f64::NAN,
        max_hs_omega: 0.0,
        abort_time: None,
        abort_reason: None,
    };
    let params = match VoigtParams::new(T::one(), T::lit(alpha), T::lit(beta)) {
        Ok(p) => p,
        Err(e) => {
            cell.abort_reason = Some(e.to_string());
            return cell;
        }
    };
    let mut tracker = DiagnosticsTracker::new(params, vec![s]);
    let mut max_hs = 0.0f64;
    let mut last_t = state0.t.as_f64();
    let outcome = integrate(state0.clone(), control, &params, |st| {
        let r = tracker.record(st)?;
        max_hs = max_hs.max(r.hs_omega[0]);
        last_t = r.t;
        Ok(())
    });
    cell.max_hs_omega = max_hs;
    match outcome {
        Ok(_) => {
            cell.completed = true;
            cell.bkm_value = tracker.bkm_integral();
        }
        Err(e) => {
            log::warn!("regime cell ({alpha}, {beta}) aborted: {e}");
            cell.abort_time = Some(match e {
                Error::NonFinite { last_good_t } => last_good_t,
                _ => last_t,
            });
            cell.abort_reason = Some(e.to_string());
        }
    }
    cell
}
