//! TOML experiment configuration.
//!
//! ```toml
//! [grid]
//! n = 64
//!
//! [params]
//! epsilon = 1.0
//! alpha = 1.0
//! beta = 1.0
//!
//! [time]
//! mode = "fixed"      # or "cfl"
//! dt = 1e-3
//! t_end = 1.0
//!
//! [initial]
//! family = "taylor_green"
//! amp = 1.0
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::initial::InitialData;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{make_grid, SpectralGrid, VoigtParams};
use crate::timestepper::{Cadence, StepControl, StepMode, DEFAULT_CFL, DEFAULT_DT_MAX, MAX_CFL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: GridSection,
    #[serde(default)]
    pub params: ParamsSection,
    pub time: TimeSection,
    pub initial: InitialData,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub regimes: RegimesSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        Self { epsilon: 1.0, alpha: 1.0, beta: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    Fixed,
    Cfl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default = "default_mode")]
    pub mode: TimeMode,
    pub dt: Option<f64>,
    pub cfl: Option<f64>,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    pub t_end: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub every_steps: Option<u64>,
    pub every_time: Option<f64>,
    pub dir: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { every_steps: None, every_time: None, dir: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    #[serde(default = "default_sobolev")]
    pub sobolev_s: Vec<f64>,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self { sobolev_s: default_sobolev() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { epsilons: default_epsilons() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimesSection {
    #[serde(default = "default_cells")]
    pub cells: Vec<[f64; 2]>,
    /// Sobolev index for the per-cell `max_t ||omega||_{H^s}`; must exceed 1.
    #[serde(default = "default_regime_s")]
    pub sobolev_s: f64,
}

impl Default for RegimesSection {
    fn default() -> Self {
        Self { cells: default_cells(), sobolev_s: default_regime_s() }
    }
}

fn one() -> f64 {
    1.0
}
fn default_mode() -> TimeMode {
    TimeMode::Cfl
}
fn default_dt_max() -> f64 {
    DEFAULT_DT_MAX
}
fn default_max_steps() -> u64 {
    10_000_000
}
fn default_sobolev() -> Vec<f64> {
    vec![1.5]
}
fn default_epsilons() -> Vec<f64> {
    vec![1e-1, 5e-2, 2.5e-2, 1.25e-2]
}
fn default_cells() -> Vec<[f64; 2]> {
    vec![
        [1.0, 1.0],
        [4.0 / 3.0, 2.0 / 3.0],
        [2.5, 0.0],
        [1.5, 1.0],
        [1.0, 0.5],
        [2.0, 0.0],
    ]
}
fn default_regime_s() -> f64 {
    1.5
}

/// Default number of steps between diagnostics outputs.
pub const DEFAULT_EVERY_STEPS: u64 = 10;

impl SolverConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SolverConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .message()
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "<document>".into());
            Error::config(key, e.to_string().replace('\n', " "))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every precondition the solver modules impose.
    pub fn validate(&self) -> Result<()> {
        let grid = make_grid::<f64>(self.grid.n)?;
        self.params::<f64>()?;
        self.control::<f64>()?.validate()?;
        self.initial.validate(grid.cutoff())?;
        if self.output.every_steps.is_some() && self.output.every_time.is_some() {
            return Err(Error::config("output", "set at most one of every_steps and every_time"));
        }
        for &s in &self.diagnostics.sobolev_s {
            if !s.is_finite() {
                return Err(Error::config("diagnostics.sobolev_s", "entries must be finite"));
            }
        }
        let eps = &self.sweep.epsilons;
        if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::config("sweep.epsilons", "need at least one finite epsilon > 0"));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::config("sweep.epsilons", "must be strictly decreasing"));
        }
        for cell in &self.regimes.cells {
            if cell.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::config("regimes.cells", format!("exponents must be >= 0, got {cell:?}")));
            }
        }
        if !(self.regimes.sobolev_s > 1.0) {
            return Err(Error::config("regimes.sobolev_s", "must exceed 1"));
        }
        Ok(())
    }

    pub fn grid<T: Real>(&self) -> Result<Arc<SpectralGrid<T>>> {
        make_grid(self.grid.n)
    }

    pub fn params<T: Real>(&self) -> Result<VoigtParams<T>> {
        let p = &self.params;
        VoigtParams::new(T::lit(p.epsilon), T::lit(p.alpha), T::lit(p.beta))
    }

    pub fn cadence<T: Real>(&self) -> Cadence<T> {
        match (self.output.every_steps, self.output.every_time) {
            (_, Some(dt)) => Cadence::EveryTime(T::lit(dt)),
            (Some(n), None) => Cadence::EverySteps(n),
            (None, None) => Cadence::EverySteps(DEFAULT_EVERY_STEPS),
        }
    }

    pub fn control<T: Real>(&self) -> Result<StepControl<T>> {
        let t = &self.time;
        let mode = match t.mode {
            TimeMode::Fixed => {
                let dt = t.dt.ok_or_else(|| Error::config("time.dt", "required when mode = \"fixed\""))?;
                StepMode::Fixed { dt: T::lit(dt) }
            }
            TimeMode::Cfl => {
                let cfl = t.cfl.unwrap_or(DEFAULT_CFL);
                if !(cfl > 0.0 && cfl <= MAX_CFL) {
                    return Err(Error::config("time.cfl", format!("must lie in (0, {MAX_CFL}], got {cfl}")));
                }
                StepMode::Cfl { cfl: T::lit(cfl) }
            }
        };
        let control = StepControl {
            mode,
            t_end: T::lit(t.t_end),
            max_steps: t.max_steps,
            dt_max: T::lit(t.dt_max),
            cadence: self.cadence(),
        };
        control.validate()?;
        Ok(control)
    }

    /// Applies a `--seed` override to random initial data.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(seed) = seed {
            self.initial = self.initial.with_seed(seed);
        }
        self
    }
}
