//! Classical fourth-order Runge-Kutta integration with fixed or CFL-limited steps.

use crate::dynamics::{RhsOperator, State};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{dealias_in_place, VoigtParams};

/// Velocity floor used by [`stable_dt`] so that a fluid at rest yields a finite step.
pub const VELOCITY_FLOOR: f64 = 1e-8;
/// Largest admissible CFL number.
pub const MAX_CFL: f64 = 0.5;
pub const DEFAULT_CFL: f64 = 0.4;
pub const DEFAULT_DT_MAX: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode<T: Real> {
    Fixed { dt: T },
    Cfl { cfl: T },
}

/// When the observer passed to [`integrate`] fires, in addition to the endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cadence<T: Real> {
    EverySteps(u64),
    EveryTime(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T: Real> {
    pub mode: StepMode<T>,
    pub t_end: T,
    pub max_steps: u64,
    /// Upper bound on CFL-mode steps.
    pub dt_max: T,
    pub cadence: Cadence<T>,
}

impl<T: Real> StepControl<T> {
    pub fn fixed(dt: T, t_end: T) -> Self {
        Self {
            mode: StepMode::Fixed { dt },
            t_end,
            max_steps: u64::MAX,
            dt_max: T::lit(DEFAULT_DT_MAX),
            cadence: Cadence::EverySteps(10),
        }
    }

    pub fn cfl(cfl: T, t_end: T) -> Self {
        Self {
            mode: StepMode::Cfl { cfl },
            ..Self::fixed(T::lit(DEFAULT_DT_MAX), t_end)
        }
    }

    pub fn with_cadence(mut self, cadence: Cadence<T>) -> Self {
        self.cadence = cadence;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v.is_finite() && v > T::zero();
        match self.mode {
            StepMode::Fixed { dt } if !positive(dt) => {
                return Err(Error::config("time.dt", format!("must be > 0, got {dt}")));
            }
            StepMode::Cfl { cfl } if !positive(cfl) || cfl > T::lit(MAX_CFL) => {
                return Err(Error::config(
                    "time.cfl",
                    format!("must lie in (0, {MAX_CFL}], got {cfl}"),
                ));
            }
            _ => {}
        }
        if !self.t_end.is_finite() || self.t_end < T::zero() {
            return Err(Error::config("time.t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if !positive(self.dt_max) {
            return Err(Error::config("time.dt_max", "must be > 0"));
        }
        if self.max_steps == 0 {
            return Err(Error::config("time.max_steps", "must be positive"));
        }
        match self.cadence {
            Cadence::EverySteps(0) => Err(Error::config("output.every_steps", "must be positive")),
            Cadence::EveryTime(dt) if !positive(dt) => {
                Err(Error::config("output.every_time", "must be > 0"))
            }
            _ => Ok(()),
        }
    }
}

/// One classical RK4 step of length `dt`; the result is projected onto the dealias mask.
pub fn rk4_step<T: Real>(state: &State<T>, dt: T, params: &VoigtParams<T>) -> Result<State<T>> {
    rk4_step_with(&RhsOperator::new(state.grid(), *params), state, dt)
}

pub fn rk4_step_with<T: Real>(op: &RhsOperator<T>, state: &State<T>, dt: T) -> Result<State<T>> {
    if !(dt > T::zero()) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let half = dt * T::lit(0.5);
    let stage = |base: &State<T>, k: &crate::dynamics::Tendency<T>, h: T| {
        let mut s = base.clone();
        s.omega.axpy(h, &k.d_omega);
        s.theta.axpy(h, &k.d_theta);
        s
    };
    let k1 = op.eval(state)?;
    let k2 = op.eval(&stage(state, &k1, half))?;
    let k3 = op.eval(&stage(state, &k2, half))?;
    let k4 = op.eval(&stage(state, &k3, dt))?;

    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);
    let mut next = state.clone();
    next.omega.axpy(sixth, &k1.d_omega);
    next.omega.axpy(third, &k2.d_omega);
    next.omega.axpy(third, &k3.d_omega);
    next.omega.axpy(sixth, &k4.d_omega);
    next.theta.axpy(sixth, &k1.d_theta);
    next.theta.axpy(third, &k2.d_theta);
    next.theta.axpy(third, &k3.d_theta);
    next.theta.axpy(sixth, &k4.d_theta);
    dealias_in_place(&mut next.omega);
    dealias_in_place(&mut next.theta);
    next.t = state.t + dt;
    if !next.is_finite() {
        return Err(Error::NonFinite {
            last_good_t: state.t.as_f64(),
        });
    }
    Ok(next)
}

/// Maximum speed `max |u|` over the grid.
pub fn max_speed<T: Real>(state: &State<T>) -> Result<T> {
    let (u1, u2) = state.velocity()?;
    let (a, b) = state.grid().inverse_pair(u1.coeffs(), u2.coeffs())?;
    Ok(a.iter()
        .zip(&b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x * x + y * y).sqrt())))
}

/// Advective step limit `cfl * dx / max(|u|_inf, floor)`, not yet clamped by `dt_max`.
pub fn stable_dt<T: Real>(state: &State<T>, cfl: T) -> Result<T> {
    let speed = max_speed(state)?.max(T::lit(VELOCITY_FLOOR));
    Ok(cfl * state.grid().dx() / speed)
}

/// Integrates from `state0.t` to `control.t_end`.
///
/// The observer sees the initial state, every state selected by the cadence,
/// and the final state, whose time is exactly `t_end`. The step sequence depends
/// only on the current state and time, so a run resumed from a checkpoint
/// retraces the uninterrupted trajectory.
pub fn integrate<T: Real, F>(
    state0: State<T>,
    control: &StepControl<T>,
    params: &VoigtParams<T>,
    mut observer: F,
) -> Result<State<T>>
where
    F: FnMut(&State<T>) -> Result<()>,
{
    control.validate()?;
    let op = RhsOperator::new(state0.grid(), *params);
    let t_end = control.t_end;
    let mut state = state0;
    observer(&state)?;

    let snap = T::lit(1e-9);
    let mut next_output = match control.cadence {
        Cadence::EveryTime(every) => state.t + every,
        Cadence::EverySteps(_) => T::infinity(),
    };
    // Fixed steps that start on a multiple of dt keep their times on that lattice,
    // so a run resumed from a checkpoint reproduces the uninterrupted times exactly.
    let lattice = match control.mode {
        StepMode::Fixed { dt } => {
            let m = (state.t / dt).round();
            ((state.t - m * dt).abs() <= dt * snap).then_some((m, dt))
        }
        StepMode::Cfl { .. } => None,
    };
    let mut steps: u64 = 0;
    while state.t < t_end {
        if steps >= control.max_steps {
            return Err(Error::MaxSteps {
                max_steps: control.max_steps,
                t: state.t.as_f64(),
            });
        }
        let nominal = match control.mode {
            StepMode::Fixed { dt } => dt,
            StepMode::Cfl { cfl } => stable_dt(&state, cfl)?.min(control.dt_max),
        };
        let remaining = t_end - state.t;
        let last = remaining <= nominal * (T::one() + snap);
        let h = if remaining >= nominal * (T::one() - snap) { nominal } else { remaining };
        state = rk4_step_with(&op, &state, h)?;
        steps += 1;
        if last {
            state.t = t_end;
        } else if let Some((m, dt)) = lattice {
            state.t = (m + T::lit(steps as f64)) * dt;
        }

        let due = match control.cadence {
            Cadence::EverySteps(n) => steps % n == 0,
            Cadence::EveryTime(every) => {
                let hit = state.t >= next_output - every * snap;
                while next_output <= state.t + every * snap {
                    next_output = next_output + every;
                }
                hit
            }
        };
        if due || last {
            observer(&state)?;
        }
    }
    Ok(state)
}
