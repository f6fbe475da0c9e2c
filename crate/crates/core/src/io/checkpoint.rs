//! Binary checkpoint format.
//!
//! Layout, all integers and reals little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 8    | magic `VBQCHKP1`                          |
//! | 8      | 4    | `u32` format version (= 1)                |
//! | 12     | 4    | `u32` grid size `N`                       |
//! | 16     | 32   | `f64` epsilon, alpha, beta, t             |
//! | 48     | B    | omega coefficient block                   |
//! | 48 + B | B    | theta coefficient block                   |
//!
//! A coefficient block lists the retained modes `|k1|, |k2| <= K` (with
//! `K` the dealias radius of the grid) row-major, `k1` outer and `k2` inner,
//! both ascending from `-K` to `K`. Each mode is written as `re` then `im`
//! (`f64`), so `B = 16 (2K + 1)^2`. Modes outside the mask are zero for every
//! valid state and are not stored.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::spectral::{make_grid, SpectralField, SpectralGrid, VoigtParams, Wavenumber};

pub const MAGIC: &[u8; 8] = b"VBQCHKP1";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 48;

pub fn encode<T: Real>(state: &State<T>, params: &VoigtParams<T>) -> Result<Vec<u8>> {
    let grid = state.grid();
    if !state.omega.is_dealiased() || !state.theta.is_dealiased() {
        return Err(Error::Precondition(
            "checkpoint requires fields inside the dealias mask".into(),
        ));
    }
    let k = grid.cutoff();
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * block_len(k));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    for v in [params.epsilon, params.alpha, params.beta, state.t] {
        out.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    for field in [&state.omega, &state.theta] {
        for k1 in -k..=k {
            for k2 in -k..=k {
                let c = field.coeff(Wavenumber::new(k1, k2));
                out.extend_from_slice(&c.re.as_f64().to_le_bytes());
                out.extend_from_slice(&c.im.as_f64().to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn decode<T: Real>(bytes: &[u8]) -> Result<(State<T>, VoigtParams<T>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!("truncated header: {} bytes", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(8);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = u32_at(12) as usize;
    let grid: Arc<SpectralGrid<T>> = make_grid(n).map_err(|_| Error::Format(format!("invalid grid size {n}")))?;
    let k = grid.cutoff();
    let expected = HEADER_LEN + 2 * block_len(k);
    if bytes.len() < expected {
        return Err(Error::Format(format!(
            "truncated payload: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    if bytes.len() > expected {
        return Err(Error::Format(format!(
            "trailing data: expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let params = VoigtParams::new(T::lit(f64_at(16)), T::lit(f64_at(24)), T::lit(f64_at(32)))
        .map_err(|e| Error::Format(e.to_string()))?;
    let t = T::lit(f64_at(40));

    let mut offset = HEADER_LEN;
    let mut read_field = || {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        for k1 in -k..=k {
            for k2 in -k..=k {
                let idx = grid.index_of(Wavenumber::new(k1, k2)).expect("retained mode on lattice");
                coeffs[idx] = Complex::new(T::lit(f64_at(offset)), T::lit(f64_at(offset + 8)));
                offset += 16;
            }
        }
        SpectralField::from_coeffs(&grid, coeffs)
    };
    let omega = read_field()?;
    let theta = read_field()?;
    Ok((State::new(omega, theta, t)?, params))
}

fn block_len(k: i64) -> usize {
    let side = (2 * k + 1) as usize;
    16 * side * side
}

pub fn checkpoint_write<T: Real>(state: &State<T>, params: &VoigtParams<T>, path: &Path) -> Result<()> {
    fs::write(path, encode(state, params)?)?;
    Ok(())
}

pub fn checkpoint_read<T: Real>(path: &Path) -> Result<(State<T>, VoigtParams<T>)> {
    decode(&fs::read(path)?)
}

/// Reads a checkpoint for resuming on `grid`, rejecting a different resolution.
pub fn checkpoint_resume<T: Real>(path: &Path, grid: &Arc<SpectralGrid<T>>) -> Result<(State<T>, VoigtParams<T>)> {
    let (state, params) = checkpoint_read::<T>(path)?;
    if state.grid().n() != grid.n() {
        return Err(Error::GridMismatch {
            expected: grid.n(),
            found: state.grid().n(),
        });
    }
    // Re-home the fields on the caller's grid so later arithmetic shares one plan.
    let omega = SpectralField::from_coeffs(grid, state.omega.into_coeffs())?;
    let theta = SpectralField::from_coeffs(grid, state.theta.into_coeffs())?;
    Ok((State::new(omega, theta, state.t)?, params))
}
