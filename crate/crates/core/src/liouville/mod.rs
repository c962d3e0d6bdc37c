//! Density matrices and the dissipative Liouville equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + FρF† − ½{F†F, ρ}
//! ```
//!
//! integrated with the classical fourth-order Runge-Kutta method. With
//! `F = 0` this is the reversible form `dρ/dt = −i[H, ρ]`.

mod crosscheck;
mod kernel;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use crosscheck::{eeqt_crosscheck, Channel, CrosscheckReport, GridLiouvillian, MAX_KERNEL_POINTS};
pub use kernel::DensityKernel;

pub type CMatrix = DMatrix<Complex64>;

/// Largest allowed `dt·(rate bound)` for a Runge-Kutta step.
pub const STABILITY_LIMIT: f64 = 0.1;

const HERMITIAN_TOL: f64 = 1e-10;

/// Hermitian matrix representing a statistical state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let dev = hermiticity_error(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(matrix))
    }

    /// Projector `ψψ†/‖ψ‖²`.
    pub fn pure_state(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let n = psi.len();
        Ok(Self(CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm)))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Frobenius norm of `ρ² − ρ`; zero for pure states.
    pub fn purity_defect(&self) -> f64 {
        (&self.0 * &self.0 - &self.0).norm()
    }
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    Ok(())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
fn spectral_radius(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigenvalues().amax()
}

/// Right-hand side of a Liouville equation.
pub trait Liouvillian: Sync {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, rho: &CMatrix) -> CMatrix;

    /// Upper bound on the generator's rates, `max(‖H‖, ‖F†F‖)`, used for the
    /// step-size check.
    fn rate_bound(&self) -> f64;
}

/// Time-dependent scaling `c(t)` of the detector operator, `F_t = c(t)·F`.
pub type Modulation = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Hamiltonian `H` and a single detector operator `F`.
#[derive(Clone)]
pub struct LindbladModel {
    hamiltonian: CMatrix,
    detector: CMatrix,
    detector_sq: CMatrix,
    modulation: Option<Modulation>,
    rate_bound: f64,
}

impl std::fmt::Debug for LindbladModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LindbladModel")
            .field("hamiltonian", &self.hamiltonian)
            .field("detector", &self.detector)
            .field("modulated", &self.modulation.is_some())
            .finish()
    }
}

impl LindbladModel {
    pub fn new(hamiltonian: CMatrix, detector: CMatrix) -> Result<Self> {
        check_square(&hamiltonian)?;
        check_square(&detector)?;
        if detector.nrows() != hamiltonian.nrows() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.nrows(),
                got: detector.nrows(),
            });
        }
        let dev = hermiticity_error(&hamiltonian);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let detector_sq = detector.adjoint() * &detector;
        let rate_bound = spectral_radius(&hamiltonian).max(spectral_radius(&detector_sq));
        Ok(Self { hamiltonian, detector, detector_sq, modulation: None, rate_bound })
    }

    /// Reversible dynamics, `F = 0`.
    pub fn unitary(hamiltonian: CMatrix) -> Result<Self> {
        let n = hamiltonian.nrows();
        Self::new(hamiltonian, CMatrix::zeros(n, n))
    }

    /// Attach a time profile `c(t)` to the detector. The step-size check
    /// assumes `|c(t)| ≤ 1`.
    pub fn with_modulation(mut self, modulation: Modulation) -> Self {
        self.modulation = Some(modulation);
        self
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn detector(&self) -> &CMatrix {
        &self.detector
    }

    fn detector_scale(&self, t: f64) -> f64 {
        self.modulation.as_ref().map_or(1.0, |c| c(t))
    }
}

impl Liouvillian for LindbladModel {
    fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn rhs(&self, t: f64, rho: &CMatrix) -> CMatrix {
        let i = Complex64::i();
        let h = &self.hamiltonian;
        let mut out = (h * rho - rho * h) * (-i);
        let c = self.detector_scale(t);
        if c != 0.0 {
            let c2 = Complex64::new(c * c, 0.0);
            let f = &self.detector;
            let ff = &self.detector_sq;
            let jump = f * rho * f.adjoint();
            let anti = ff * rho + rho * ff;
            out += (jump - anti * Complex64::new(0.5, 0.0)) * c2;
        }
        out
    }

    fn rate_bound(&self) -> f64 {
        self.rate_bound
    }
}

/// `−i[H, ρ] + FρF† − ½{F†F, ρ}` at `t = 0`.
pub fn liouville_rhs(rho: &DensityMatrix, model: &LindbladModel) -> Result<CMatrix> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: rho.dim() });
    }
    Ok(model.rhs(0.0, rho.matrix()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().unwrap()
    }

    pub fn max_trace_drift(&self) -> f64 {
        let t0 = self.states[0].trace();
        self.states.iter().map(|s| (s.trace() - t0).abs()).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.states.iter().map(|s| s.hermiticity_error()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.states.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min)
    }
}

fn check_step(model: &impl Liouvillian, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::NonPositiveStep(dt));
    }
    let phase = dt * model.rate_bound();
    if phase >= STABILITY_LIMIT {
        return Err(Error::StepSize { dt, phase, limit: STABILITY_LIMIT });
    }
    Ok(())
}

pub(crate) fn rk4_step(model: &impl Liouvillian, t: f64, dt: f64, rho: &CMatrix) -> CMatrix {
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let k1 = model.rhs(t, rho);
    let k2 = model.rhs(t + 0.5 * dt, &(rho + &k1 * half));
    let k3 = model.rhs(t + 0.5 * dt, &(rho + &k2 * half));
    let k4 = model.rhs(t + dt, &(rho + &k3 * full));
    let sixth = Complex64::new(dt / 6.0, 0.0);
    rho + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * sixth
}

/// Integrate and call `observe(step, t, ρ)` after every step (and once for
/// the initial state with step 0). Returns the final state.
pub fn integrate_with<L, F>(rho0: &CMatrix, model: &L, dt: f64, steps: usize, mut observe: F) -> Result<CMatrix>
where
    L: Liouvillian,
    F: FnMut(usize, f64, &CMatrix),
{
    if rho0.nrows() != model.dim() || rho0.ncols() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: rho0.nrows() });
    }
    check_step(model, dt)?;
    let mut rho = rho0.clone();
    observe(0, 0.0, &rho);
    for s in 0..steps {
        let t = s as f64 * dt;
        rho = rk4_step(model, t, dt, &rho);
        observe(s + 1, t + dt, &rho);
    }
    Ok(rho)
}

/// Integrate and keep every intermediate state.
pub fn integrate(rho0: &DensityMatrix, model: &impl Liouvillian, dt: f64, steps: usize) -> Result<Trajectory> {
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    integrate_with(rho0.matrix(), model, dt, steps, |_, t, rho| {
        times.push(t);
        states.push(DensityMatrix(rho.clone()));
    })?;
    Ok(Trajectory { times, states })
}
