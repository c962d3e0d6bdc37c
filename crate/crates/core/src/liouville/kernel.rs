use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::wavefunction::WaveFunction;

/// Density operator in position representation, `K_ij = ρ(x_i, x_j)`.
///
/// Acting on a state uses the quadrature `(ρψ)(x_i) = Σ_j K_ij ψ(x_j) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityKernel {
    grid: Grid1D,
    values: CMatrix,
}

impl DensityKernel {
    pub fn new(grid: Grid1D, values: CMatrix) -> Result<Self> {
        if values.nrows() != grid.len() || values.ncols() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.nrows() });
        }
        Ok(Self { grid, values })
    }

    /// `ρ(x, y) = ψ(x) ψ̄(y) / ‖ψ‖²`.
    pub fn pure(wf: &WaveFunction) -> Result<Self> {
        let norm = wf.norm_sqr();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let a = wf.amplitudes();
        let n = a.len();
        let values = CMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj() / norm);
        Ok(Self { grid: *wf.grid(), values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    /// `∫ ρ(x, x) dx`.
    pub fn trace(&self) -> f64 {
        self.values.trace().re * self.grid.dx()
    }

    /// `(ρψ)(x) = ∫ ρ(x, y) ψ(y) dy`.
    pub fn apply(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        if wf.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let psi = nalgebra::DVector::from_column_slice(wf.amplitudes());
        let out = &self.values * psi * Complex64::new(self.grid.dx(), 0.0);
        WaveFunction::new(self.grid, out.as_slice().to_vec())
    }

    /// Matrix of the operator in the orthonormal basis `δ_{x_j}/√dx`.
    pub fn to_operator(&self) -> CMatrix {
        &self.values * Complex64::new(self.grid.dx(), 0.0)
    }

    pub fn from_operator(grid: Grid1D, operator: &CMatrix) -> Result<Self> {
        Self::new(grid, operator * Complex64::new(1.0 / grid.dx(), 0.0))
    }
}
