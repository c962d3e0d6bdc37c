//! Spectral time stepping: free and potential split-step evolution, and the
//! damped evolution under `H − (i/2)κδ(x − a)` used for detection.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::wavefunction::{Fourier, WaveFunction};

/// Largest allowed kinetic phase increment per step.
pub const MAX_PHASE_STEP: f64 = std::f64::consts::PI;

/// How the point interaction `δ(x − a)` is represented on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// Indicator of the nearest grid point with weight `1/dx`.
    GridPoint,
    /// Normalized Gaussian of standard deviation `width`.
    Gaussian { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub position: f64,
    pub kappa: f64,
    pub regularization: Regularization,
}

impl DetectorSpec {
    pub fn new(position: f64, kappa: f64, regularization: Regularization) -> Result<Self> {
        let d = Self { position, kappa, regularization };
        d.validate()?;
        Ok(d)
    }

    /// Grid-point detector at `position`.
    pub fn point(position: f64, kappa: f64) -> Result<Self> {
        Self::new(position, kappa, Regularization::GridPoint)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.position, kappa, self.regularization)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidDetector(format!(
                "sensitivity must be non-negative, got {}",
                self.kappa
            )));
        }
        if !self.position.is_finite() {
            return Err(Error::InvalidDetector("position must be finite".into()));
        }
        if let Regularization::Gaussian { width } = self.regularization {
            if !(width > 0.0 && width.is_finite()) {
                return Err(Error::InvalidDetector(format!(
                    "gaussian width must be positive, got {width}"
                )));
            }
        }
        Ok(())
    }

    /// Sparse weights `w_j` with `Σ w_j·dx = 1` approximating `δ(x − a)`.
    pub fn weights(&self, grid: &Grid1D) -> Vec<(usize, f64)> {
        match self.regularization {
            Regularization::GridPoint => vec![(grid.nearest_index(self.position), 1.0 / grid.dx())],
            Regularization::Gaussian { width } => {
                let raw: Vec<(usize, f64)> = grid
                    .positions()
                    .enumerate()
                    .map(|(j, x)| (j, (-(x - self.position).powi(2) / (2.0 * width * width)).exp()))
                    .filter(|(_, w)| *w > 1e-16)
                    .collect();
                let total: f64 = raw.iter().map(|(_, w)| w).sum::<f64>() * grid.dx();
                raw.into_iter().map(|(j, w)| (j, w / total)).collect()
            }
        }
    }
}

/// Strang-split spectral propagator for `H = −½∂² + V(x)`.
#[derive(Debug, Clone)]
pub struct SplitStep {
    grid: Grid1D,
    dt: f64,
    fourier: Fourier,
    kinetic: Vec<Complex64>,
    half_potential: Option<Vec<Complex64>>,
}

impl SplitStep {
    pub fn new(grid: Grid1D, potential: Option<&[f64]>, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::NonPositiveStep(dt));
        }
        let half_potential = match potential {
            Some(v) if v.len() != grid.len() => {
                return Err(Error::LengthMismatch { expected: grid.len(), got: v.len() })
            }
            Some(v) => Some(v.iter().map(|v| Complex64::from_polar(1.0, -0.5 * v * dt)).collect()),
            None => None,
        };
        Ok(Self {
            grid,
            dt,
            fourier: Fourier::new(grid.len()),
            kinetic: kinetic_phases(&grid, dt),
            half_potential,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Reject step sizes whose kinetic phase increment at the state's
    /// bandwidth would exceed [`MAX_PHASE_STEP`].
    pub fn check_step(&self, wf: &WaveFunction) -> Result<()> {
        check_step(wf, self.dt)
    }

    pub fn step(&self, amplitudes: &mut [Complex64]) {
        if let Some(v) = &self.half_potential {
            amplitudes.iter_mut().zip(v).for_each(|(a, p)| *a *= p);
        }
        self.fourier.forward(amplitudes);
        amplitudes.iter_mut().zip(&self.kinetic).for_each(|(a, p)| *a *= p);
        self.fourier.inverse(amplitudes);
        if let Some(v) = &self.half_potential {
            amplitudes.iter_mut().zip(v).for_each(|(a, p)| *a *= p);
        }
    }

    pub fn evolve(&self, wf: &WaveFunction, steps: usize) -> Result<WaveFunction> {
        if *wf.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        self.check_step(wf)?;
        let mut out = wf.clone();
        for _ in 0..steps {
            self.step(out.amplitudes_mut());
        }
        Ok(out)
    }
}

fn kinetic_phases(grid: &Grid1D, dt: f64) -> Vec<Complex64> {
    (0..grid.len())
        .map(|b| {
            let k = grid.fft_k(b);
            Complex64::from_polar(1.0, -0.5 * k * k * dt)
        })
        .collect()
}

fn check_step(wf: &WaveFunction, dt: f64) -> Result<()> {
    let k = wf.to_momentum().bandwidth();
    let phase = 0.5 * k * k * dt;
    if phase >= MAX_PHASE_STEP {
        return Err(Error::StepSize { dt, phase, limit: MAX_PHASE_STEP });
    }
    Ok(())
}

/// Evolve `wf` for `steps` Strang steps of size `dt` under `−½∂² + V`.
pub fn split_step_evolve(
    wf: &WaveFunction,
    potential: Option<&[f64]>,
    dt: f64,
    steps: usize,
) -> Result<WaveFunction> {
    SplitStep::new(*wf.grid(), potential, dt)?.evolve(wf, steps)
}

/// Norm and detector-site history of a damped evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRecord {
    pub detector: DetectorSpec,
    pub dt: f64,
    /// `t_j = j·dt` for `j = 0..=steps`.
    pub times: Vec<f64>,
    pub norms_sqr: Vec<f64>,
    /// `Σ w_j|ψ_j|²·dx`, i.e. `|ψ(a)|²` for a grid-point detector.
    pub site_densities: Vec<f64>,
    pub final_state: WaveFunction,
}

impl EvolutionRecord {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn norm_loss(&self) -> Vec<f64> {
        self.norms_sqr.iter().map(|n| 1.0 - n).collect()
    }
}

/// Evolve under `H − (i/2)F†F` with `F†F = κ·w(x)`, the regularized point
/// detector.
///
/// Each step is kinetic phase sandwiched between two exact half-step damping
/// factors `exp(−κ·w_j·dt/4)`; for a grid-point detector the full-step factor
/// at the detector site is `exp(−κ·dt/(2·dx))`.
pub fn damped_evolve(
    wf: &WaveFunction,
    detector: &DetectorSpec,
    dt: f64,
    steps: usize,
) -> Result<EvolutionRecord> {
    detector.validate()?;
    let stepper = SplitStep::new(*wf.grid(), None, dt)?;
    stepper.check_step(wf)?;
    let grid = *wf.grid();
    let dx = grid.dx();
    let weights = detector.weights(&grid);
    let half_damping: Vec<(usize, f64)> = weights
        .iter()
        .map(|&(j, w)| (j, (-0.25 * detector.kappa * w * dt).exp()))
        .collect();
    let site = |a: &[Complex64]| -> f64 {
        weights.iter().map(|&(j, w)| w * a[j].norm_sqr()).sum::<f64>() * dx
    };

    let mut psi = wf.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut norms_sqr = Vec::with_capacity(steps + 1);
    let mut site_densities = Vec::with_capacity(steps + 1);
    times.push(0.0);
    norms_sqr.push(psi.norm_sqr());
    site_densities.push(site(psi.amplitudes()));

    for s in 1..=steps {
        let a = psi.amplitudes_mut();
        for &(j, f) in &half_damping {
            a[j] *= f;
        }
        stepper.fourier.forward(a);
        a.iter_mut().zip(&stepper.kinetic).for_each(|(a, p)| *a *= p);
        stepper.fourier.inverse(a);
        for &(j, f) in &half_damping {
            a[j] *= f;
        }
        times.push(s as f64 * dt);
        norms_sqr.push(psi.norm_sqr());
        site_densities.push(site(psi.amplitudes()));
    }

    Ok(EvolutionRecord {
        detector: *detector,
        dt,
        times,
        norms_sqr,
        site_densities,
        final_state: psi,
    })
}
