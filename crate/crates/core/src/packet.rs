//! The Gaussian test packet and its exact free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::wavefunction::WaveFunction;

/// Boundary amplitude above which sampling logs a warning.
pub const LEAK_WARN: f64 = 1e-12;
/// Boundary amplitude above which sampling fails.
pub const LEAK_FAIL: f64 = 1e-6;

/// `ψ(x) = (2α/π)^{1/4} exp(−α(x − x₀)² + i k₀ x + i φ₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub phase: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, width: f64, momentum: f64, phase: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::PacketWidth(width));
        }
        Ok(Self { center, width, momentum, phase })
    }

    /// Centered at −4, unit width exponent, moving right with velocity 4.
    pub fn reference() -> Self {
        Self { center: -4.0, width: 1.0, momentum: 4.0, phase: 16.0 }
    }

    pub fn velocity(&self) -> f64 {
        self.momentum
    }

    fn prefactor(&self) -> f64 {
        (2.0 * self.width / PI).powf(0.25)
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let d = x - self.center;
        Complex64::from_polar(
            self.prefactor() * (-self.width * d * d).exp(),
            self.momentum * x + self.phase,
        )
    }

    /// Exact free evolution (`m = ħ = 1`):
    ///
    /// `ψ(t,x) = N/√s · exp(−α(x − x₀ − k₀t)²/s + i k₀(x − x₀) − i k₀² t/2 + i k₀ x₀ + i φ₀)`
    /// with `s = 1 + 2iαt`.
    pub fn evolved_value(&self, t: f64, x: f64) -> Complex64 {
        let s = Complex64::new(1.0, 2.0 * self.width * t);
        let d = x - self.center - self.momentum * t;
        let k = self.momentum;
        let exponent = -self.width * d * d / s
            + Complex64::i()
                * (k * (x - self.center) - 0.5 * k * k * t + k * self.center + self.phase);
        self.prefactor() * exponent.exp() / s.sqrt()
    }

    /// Sample the packet on `grid`, checking that it does not leak off the ends.
    pub fn sample(&self, grid: &Grid1D) -> Result<WaveFunction> {
        let wf = WaveFunction::from_fn(*grid, |x| self.value(x));
        check_leakage(&wf)?;
        Ok(wf)
    }

    pub fn sample_evolved(&self, t: f64, grid: &Grid1D) -> WaveFunction {
        WaveFunction::from_fn(*grid, |x| self.evolved_value(t, x))
    }
}

pub(crate) fn check_leakage(wf: &WaveFunction) -> Result<()> {
    let edge = wf.boundary_amplitude();
    if edge > LEAK_FAIL {
        return Err(Error::Leakage(edge));
    }
    if edge > LEAK_WARN {
        log::warn!("state reaches the grid boundary with amplitude {edge:e}");
    }
    Ok(())
}

/// The reference packet's closed-form free evolution on `grid`, written as
/// `(2/π)^{1/4} exp((−8t + i(x+4)² + 4(x+4))/(2t − i)) / √(1 + 2it)`.
pub fn analytic_gaussian(t: f64, grid: &Grid1D) -> WaveFunction {
    let norm = (2.0 / PI).powf(0.25);
    WaveFunction::from_fn(*grid, |x| {
        let y = x + 4.0;
        let num = Complex64::new(-8.0 * t + 4.0 * y, y * y);
        let den = Complex64::new(2.0 * t, -1.0);
        norm * (num / den).exp() / Complex64::new(1.0, 2.0 * t).sqrt()
    })
}
