//! Single-configuration runs: integrate, stream diagnostics, checkpoint the end state.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker};
use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::io::{checkpoint_resume, checkpoint_write, make_initial_data, write_diagnostics, SolverConfig};
use crate::timestepper::integrate;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.ndjson";
pub const CHECKPOINT_FILE: &str = "checkpoint.bin";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub records: usize,
    pub final_record: DiagnosticsRecord,
    pub diagnostics_path: PathBuf,
    pub checkpoint_path: PathBuf,
}

/// Integrates `config` in double precision and writes `diagnostics.ndjson` and
/// `checkpoint.bin` into `out_dir`.
///
/// With `resume`, integration restarts from the checkpoint's state and time and the
/// diagnostics file covers the remaining interval only. The checkpoint must have
/// been written on the same grid with the same parameters.
///
/// Everything is validated before `out_dir` is touched, so a rejected
/// configuration leaves no files behind.
pub fn run_config(config: &SolverConfig, out_dir: &Path, resume: Option<&Path>) -> Result<RunSummary> {
    config.validate()?;
    let grid = config.grid::<f64>()?;
    let params = config.params::<f64>()?;
    let control = config.control::<f64>()?;

    let state0: State<f64> = match resume {
        Some(path) => {
            let (state, stored) = checkpoint_resume(path, &grid)?;
            if stored != params {
                return Err(Error::config(
                    "params",
                    format!(
                        "checkpoint was written with (eps, alpha, beta) = ({}, {}, {})",
                        stored.epsilon, stored.alpha, stored.beta
                    ),
                ));
            }
            if !(state.t < control.t_end) {
                return Err(Error::config(
                    "time.t_end",
                    format!("must exceed the checkpoint time {}", state.t),
                ));
            }
            state
        }
        None => make_initial_data(&config.initial, &grid)?,
    };

    fs::create_dir_all(out_dir)?;
    let diagnostics_path = out_dir.join(DIAGNOSTICS_FILE);
    let checkpoint_path = out_dir.join(CHECKPOINT_FILE);
    let mut sink = BufWriter::new(File::create(&diagnostics_path)?);
    let mut tracker = DiagnosticsTracker::new(params, config.diagnostics.sobolev_s.clone());
    let mut records = 0usize;

    log::info!(
        "run N={} eps={} alpha={} beta={} from t={} to t={}",
        grid.n(),
        params.epsilon,
        params.alpha,
        params.beta,
        state0.t,
        control.t_end
    );
    let outcome = integrate(state0, &control, &params, |s| {
        let r = tracker.record(s)?;
        write_diagnostics(&r, &mut sink)?;
        records += 1;
        log::debug!("t = {:.6} |omega| = {:.6e} bkm = {:.6e}", r.t, r.l2_omega, r.bkm_integral);
        Ok(())
    });
    sink.flush()?;
    let final_state = outcome?;
    checkpoint_write(&final_state, &params, &checkpoint_path)?;

    let final_record = tracker
        .last()
        .cloned()
        .ok_or_else(|| Error::Precondition("integration produced no diagnostics".into()))?;
    Ok(RunSummary {
        records,
        final_record,
        diagnostics_path,
        checkpoint_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, t_end: f64) -> SolverConfig {
        SolverConfig::from_toml_str(&format!(
            r#"
            [grid]
            n = {n}
            [time]
            mode = "fixed"
            dt = 0.01
            t_end = {t_end}
            [initial]
            family = "taylor_green"
            amp = 1.0
            "#
        ))
        .unwrap()
    }

    #[test]
    fn writes_both_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let s = run_config(&config(16, 0.2), &out, None).unwrap();
        assert_eq!(s.records, 3);
        assert_eq!(s.final_record.t, 0.2);
        assert!(s.checkpoint_path.exists());
        let text = fs::read_to_string(&s.diagnostics_path).unwrap();
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn invalid_grid_creates_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let mut cfg = config(16, 0.2);
        cfg.grid.n = 15;
        assert!(matches!(run_config(&cfg, &out, None), Err(Error::Config { .. })));
        assert!(!out.exists());
    }

    #[test]
    fn resume_requires_matching_params_and_later_end() {
        let dir = tempfile::tempdir().unwrap();
        let first = run_config(&config(16, 0.1), dir.path(), None).unwrap();
        let ckpt = dir.path().join("first.bin");
        fs::rename(&first.checkpoint_path, &ckpt).unwrap();
        assert!(run_config(&config(16, 0.1), &dir.path().join("a"), Some(&ckpt)).is_err());
        let mut other = config(16, 0.3);
        other.params.alpha = 2.0;
        assert!(run_config(&other, &dir.path().join("b"), Some(&ckpt)).is_err());
        assert!(run_config(&config(32, 0.3), &dir.path().join("c"), Some(&ckpt)).is_err());
        let resumed = run_config(&config(16, 0.3), &dir.path().join("d"), Some(&ckpt)).unwrap();
        assert_eq!(resumed.final_record.t, 0.3);
    }
}
