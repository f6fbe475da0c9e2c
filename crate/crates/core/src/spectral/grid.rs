use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::real::Real;

/// Integer wavenumber `k = (k1, k2)` on the torus lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wavenumber {
    pub k1: i64,
    pub k2: i64,
}

impl Wavenumber {
    pub const fn new(k1: i64, k2: i64) -> Self {
        Self { k1, k2 }
    }

    pub const fn neg(self) -> Self {
        Self::new(-self.k1, -self.k2)
    }

    /// Euclidean length `|k|`.
    pub fn norm<T: Real>(self) -> T {
        T::lit(((self.k1 * self.k1 + self.k2 * self.k2) as f64).sqrt())
    }

    pub const fn is_zero(self) -> bool {
        self.k1 == 0 && self.k2 == 0
    }
}

/// Uniform `N x N` discretization of `[0, 2pi)^2` together with its Fourier lattice.
///
/// Modes are stored in FFT order, row-major over `(k1, k2)`: linear index
/// `i1 * N + i2` holds the wavenumber `(w(i1), w(i2))` with `w(i) = i` for
/// `i <= N/2` and `i - N` otherwise. Physical samples use the same layout with
/// `x = (2 pi j1 / N, 2 pi j2 / N)`.
///
/// The dealias mask retains `|k1|, |k2| <= K` where `K` is the largest integer
/// with `3K < N`. Under that condition every aliased product mode lands
/// strictly outside the mask.
pub struct SpectralGrid<T: Real> {
    n: usize,
    cutoff: i64,
    k1: Vec<T>,
    k2: Vec<T>,
    kmag: Vec<T>,
    mask: Vec<bool>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

impl<T: Real> PartialEq for SpectralGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

/// Builds the grid for `n` modes per dimension.
pub fn make_grid<T: Real>(n: usize) -> Result<Arc<SpectralGrid<T>>> {
    SpectralGrid::new(n).map(Arc::new)
}

impl<T: Real> SpectralGrid<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::config(
                "grid.n",
                format!("N must be even and at least 8, got {n}"),
            ));
        }
        let cutoff = ((n - 1) / 3) as i64;
        let mut k1 = Vec::with_capacity(n * n);
        let mut k2 = Vec::with_capacity(n * n);
        let mut kmag = Vec::with_capacity(n * n);
        let mut mask = Vec::with_capacity(n * n);
        for i1 in 0..n {
            for i2 in 0..n {
                let k = Wavenumber::new(wavenumber(i1, n), wavenumber(i2, n));
                k1.push(T::lit(k.k1 as f64));
                k2.push(T::lit(k.k2 as f64));
                kmag.push(k.norm());
                mask.push(k.k1.abs() <= cutoff && k.k2.abs() <= cutoff);
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            cutoff,
            k1,
            k2,
            kmag,
            mask,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    /// Modes per dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored modes (`N^2`).
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Dealias radius `K`.
    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Grid spacing `2 pi / N`.
    pub fn dx(&self) -> T {
        T::TAU() / T::lit(self.n as f64)
    }

    pub fn wavenumber_at(&self, index: usize) -> Wavenumber {
        Wavenumber::new(wavenumber(index / self.n, self.n), wavenumber(index % self.n, self.n))
    }

    /// Linear index of `k`, or `None` if `k` is not on the lattice.
    pub fn index_of(&self, k: Wavenumber) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let on_lattice = |c: i64| c > -half && c <= half;
        if !on_lattice(k.k1) || !on_lattice(k.k2) {
            return None;
        }
        let n = self.n as i64;
        Some((k.k1.rem_euclid(n) * n + k.k2.rem_euclid(n)) as usize)
    }

    /// Index of `-k` for the mode stored at `index`. The Nyquist row and column map to themselves.
    pub fn conjugate_index(&self, index: usize) -> usize {
        let (i1, i2) = (index / self.n, index % self.n);
        ((self.n - i1) % self.n) * self.n + (self.n - i2) % self.n
    }

    /// First wavenumber component for every stored mode.
    pub fn k1(&self) -> &[T] {
        &self.k1
    }

    pub fn k2(&self) -> &[T] {
        &self.k2
    }

    /// `|k|` for every stored mode.
    pub fn kmag(&self) -> &[T] {
        &self.kmag
    }

    /// 2/3-rule mask for every stored mode.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn in_mask(&self, k: Wavenumber) -> bool {
        k.k1.abs() <= self.cutoff && k.k2.abs() <= self.cutoff
    }

    /// Number of modes retained by the dealias mask.
    pub fn retained_modes(&self) -> usize {
        let side = (2 * self.cutoff + 1) as usize;
        side * side
    }

    /// Physical samples to Fourier coefficients with `f_hat(0)` equal to the mean.
    ///
    /// The output is symmetrized so that Hermitian symmetry holds exactly.
    pub fn forward(&self, samples: &[T]) -> Result<Vec<Complex<T>>> {
        self.check_len(samples.len())?;
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.fft2(&mut buf, &self.forward);
        let scale = T::one() / T::lit((self.n * self.n) as f64);
        for c in buf.iter_mut() {
            *c = c.scale(scale);
        }
        self.symmetrize(&mut buf);
        Ok(buf)
    }

    /// Fourier coefficients to real physical samples.
    pub fn inverse(&self, coeffs: &[Complex<T>]) -> Result<Vec<T>> {
        self.check_len(coeffs.len())?;
        let mut buf = coeffs.to_vec();
        self.fft2(&mut buf, &self.inverse);
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    /// Transforms two real sample arrays with a single complex FFT.
    pub fn forward_pair(&self, a: &[T], b: &[T]) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let mut buf: Vec<Complex<T>> = a.iter().zip(b).map(|(&x, &y)| Complex::new(x, y)).collect();
        self.fft2(&mut buf, &self.forward);
        let scale = T::lit(0.5) / T::lit((self.n * self.n) as f64);
        let mut fa = vec![Complex::new(T::zero(), T::zero()); buf.len()];
        let mut fb = fa.clone();
        for idx in 0..buf.len() {
            let c = buf[idx];
            let d = buf[self.conjugate_index(idx)].conj();
            // a_hat = (c + d) / 2, b_hat = (c - d) / (2i)
            fa[idx] = (c + d).scale(scale);
            let e = c - d;
            fb[idx] = Complex::new(e.im, -e.re).scale(scale);
        }
        Ok((fa, fb))
    }

    /// Inverse transform of two Hermitian coefficient tables with a single complex FFT.
    pub fn inverse_pair(&self, a: &[Complex<T>], b: &[Complex<T>]) -> Result<(Vec<T>, Vec<T>)> {
        self.check_len(a.len())?;
        self.check_len(b.len())?;
        let mut buf: Vec<Complex<T>> = a
            .iter()
            .zip(b)
            .map(|(x, y)| Complex::new(x.re - y.im, x.im + y.re))
            .collect();
        self.fft2(&mut buf, &self.inverse);
        Ok(buf.into_iter().map(|c| (c.re, c.im)).unzip())
    }

    /// Replaces `c_k` by `(c_k + conj(c_{-k})) / 2`.
    pub(crate) fn symmetrize(&self, buf: &mut [Complex<T>]) {
        let half = T::lit(0.5);
        for idx in 0..buf.len() {
            let cj = self.conjugate_index(idx);
            if cj < idx {
                continue;
            }
            if cj == idx {
                buf[idx].im = T::zero();
                continue;
            }
            let a = buf[idx];
            let b = buf[cj];
            let re = (a.re + b.re) * half;
            let im = (a.im - b.im) * half;
            buf[idx] = Complex::new(re, im);
            buf[cj] = Complex::new(re, -im);
        }
    }

    fn check_len(&self, found: usize) -> Result<()> {
        let expected = self.len();
        if found != expected {
            return Err(Error::DimensionMismatch { expected, found });
        }
        Ok(())
    }

    fn fft2(&self, buf: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose_square(buf, self.n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose_square(buf, self.n);
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn transpose_square<C: Copy>(buf: &mut [C], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            buf.swap(r * n + c, c * n + r);
        }
    }
}
