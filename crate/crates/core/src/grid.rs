use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[x_min, x_max)` with `n` points.
///
/// Point `j` sits at `x_min + j·dx`. The conjugate momentum grid has spacing
/// `dk = 2π/(n·dx)` and spans `[−π/dx, π/dx)`; momentum index `m` maps to
/// `k = (m − n/2)·dk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::DegenerateInterval { min: x_min, max: x_max });
        }
        Ok(Self { x_min, x_max, n })
    }

    /// The default domain used throughout: `[−20, 20)` with 4096 points.
    pub fn standard() -> Self {
        Self { x_min: -20.0, x_max: 20.0, n: 4096 }
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length()
    }

    /// Largest momentum magnitude on the grid, `π/dx`.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Momentum at centered index `m`.
    pub fn k(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.dk()
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |m| self.k(m))
    }

    /// Momentum of raw FFT bin `b` (standard wrap-around ordering).
    pub fn fft_k(&self, b: usize) -> f64 {
        let half = self.n / 2;
        let m = if b < half { b as f64 } else { b as f64 - self.n as f64 };
        m * self.dk()
    }

    /// Index of the grid point closest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx()).round();
        j.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// The grid extended symmetrically by a power-of-two `factor`, keeping
    /// `dx` and the original points.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::GridSize(factor));
        }
        let extra = (factor - 1) * self.n / 2;
        let dx = self.dx();
        Grid1D::new(
            self.x_min - extra as f64 * dx,
            self.x_max + extra as f64 * dx,
            self.n * factor,
        )
    }
}
