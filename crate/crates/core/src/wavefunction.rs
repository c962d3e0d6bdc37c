//! Wave functions on a [`Grid1D`] and their momentum representation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Relative spectral density below which a momentum component counts as
/// empty when estimating a state's bandwidth.
pub const BANDWIDTH_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: amplitudes.len() });
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.positions().map(f).collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `Σ|ψ_j|²·dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `|ψ_j|²` at every grid point.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Σ x_j|ψ_j|²·dx / Σ|ψ_j|²·dx`.
    pub fn expectation_position(&self) -> f64 {
        let (num, den) = self
            .grid
            .positions()
            .zip(&self.amplitudes)
            .fold((0.0, 0.0), |(n, d), (x, a)| (n + x * a.norm_sqr(), d + a.norm_sqr()));
        num / den
    }

    pub fn expectation_momentum(&self) -> f64 {
        self.to_momentum().expectation_momentum()
    }

    /// `⟨self, other⟩ = Σ conj(self_j)·other_j·dx`.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx())
    }

    /// L² distance `(Σ|a_j − b_j|²·dx)^½`.
    pub fn l2_distance(&self, other: &WaveFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    pub fn sup_distance(&self, other: &WaveFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest amplitude modulus at the two ends of the grid.
    pub fn boundary_amplitude(&self) -> f64 {
        let n = self.amplitudes.len();
        self.amplitudes[0].norm().max(self.amplitudes[n - 1].norm())
    }

    /// Embed the state in a grid `factor` times wider, padding with zeros.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.padded(factor)?;
        let offset = (factor - 1) * self.grid.len() / 2;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); grid.len()];
        amplitudes[offset..offset + self.amplitudes.len()].copy_from_slice(&self.amplitudes);
        Ok(Self { grid, amplitudes })
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
        self
    }

    /// Complex conjugate in position space (time reversal of a free state).
    pub fn conjugated(&self) -> Self {
        Self { grid: self.grid, amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect() }
    }

    pub fn to_momentum(&self) -> SpectralWaveFunction {
        Fourier::new(self.grid.len()).to_momentum(self)
    }
}

/// Momentum-space amplitudes `ψ̃(k_m)` in the continuum `1/√(2π)` convention,
/// stored in centered order (`k` increasing from `−π/dx`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWaveFunction {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
}

impl SpectralWaveFunction {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: amplitudes.len() });
        }
        Ok(Self { grid, amplitudes })
    }

    /// The position grid this spectrum is conjugate to.
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dk(&self) -> f64 {
        self.grid.dk()
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.momenta()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dk()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn expectation_momentum(&self) -> f64 {
        let (num, den) = self
            .momenta()
            .zip(&self.amplitudes)
            .fold((0.0, 0.0), |(n, d), (k, a)| (n + k * a.norm_sqr(), d + a.norm_sqr()));
        num / den
    }

    /// Largest `|k|` whose spectral density exceeds [`BANDWIDTH_THRESHOLD`]
    /// times the peak density. Zero for the zero state.
    pub fn bandwidth(&self) -> f64 {
        let density = self.density();
        let peak = density.iter().cloned().fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.momenta()
            .zip(&density)
            .filter(|(_, d)| **d >= BANDWIDTH_THRESHOLD * peak)
            .map(|(k, _)| k.abs())
            .fold(0.0, f64::max)
    }

    pub fn to_position(&self) -> WaveFunction {
        Fourier::new(self.grid.len()).to_position(self)
    }

    /// Spectrum of `ψ(x − shift)`, i.e. `ψ̃(k)·e^{−ik·shift}`.
    pub fn translated(&self, shift: f64) -> Self {
        let amplitudes = self
            .momenta()
            .zip(&self.amplitudes)
            .map(|(k, a)| a * Complex64::from_polar(1.0, -k * shift))
            .collect();
        Self { grid: self.grid, amplitudes }
    }
}

/// Cached forward and inverse FFT plans for one grid size.
#[derive(Clone)]
pub struct Fourier {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("n", &self.n).finish()
    }
}

impl Fourier {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n), n }
    }

    /// Unnormalized in-place forward DFT in raw bin order.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Inverse DFT including the `1/n` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|a| *a *= s);
    }

    /// `ψ̃(k_m) = (1/√(2π)) Σ_j ψ(x_j) e^{−i k_m x_j} dx`.
    ///
    /// The `(−1)^j` pre-factor shifts bin `m` to `k = (m − n/2)·dk`; the
    /// `e^{−i k x_min}` post-factor accounts for the grid not starting at 0.
    pub fn to_momentum(&self, wf: &WaveFunction) -> SpectralWaveFunction {
        let grid = *wf.grid();
        assert_eq!(grid.len(), self.n, "plan size does not match grid");
        let mut data: Vec<Complex64> = wf
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
            .collect();
        self.forward(&mut data);
        let scale = grid.dx() / (2.0 * PI).sqrt();
        let x0 = grid.x_min();
        for (m, a) in data.iter_mut().enumerate() {
            *a *= Complex64::from_polar(scale, -grid.k(m) * x0);
        }
        SpectralWaveFunction { grid, amplitudes: data }
    }

    pub fn to_position(&self, spectral: &SpectralWaveFunction) -> WaveFunction {
        let grid = *spectral.grid();
        assert_eq!(grid.len(), self.n, "plan size does not match grid");
        let x0 = grid.x_min();
        let mut data: Vec<Complex64> = spectral
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(m, a)| a * Complex64::from_polar(1.0, grid.k(m) * x0))
            .collect();
        self.inverse(&mut data);
        let scale = (2.0 * PI).sqrt() / grid.dx();
        for (j, a) in data.iter_mut().enumerate() {
            *a *= if j % 2 == 0 { scale } else { -scale };
        }
        WaveFunction { grid, amplitudes: data }
    }
}
