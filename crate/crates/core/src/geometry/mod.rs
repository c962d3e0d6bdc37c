//! Affine connections of Galilei-Newton space-time on a sampled grid.
//!
//! Coordinates are adapted, `(t, x¹, x², x³)`, so the time form is `dt` and
//! the degenerate contravariant metric is `diag(0, g^{ij})`. A torsion-free
//! connection preserving both has `Γ⁰_{μν} = 0`, the Levi-Civita space part
//! of `g_ij`, and is otherwise fixed by an antisymmetric `Φ_μν`:
//!
//! ```text
//! Γ_{ij,k} = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij)
//! Γ_{i0,k} = ½(∂_0 g_ik + Φ_ik)
//! Γ_{00,k} = Φ_0k
//! ```
//!
//! with `Γ_{μν,k} = g_kl Γ^l_{μν}`.
//!
//! Derivatives used to build fields are second-order centered differences
//! (first-order one-sided on the faces). The verifiers use fourth-order
//! centered stencils, so their residuals measure the construction error.

mod connection;
mod fields;
mod model;
mod study;

use crate::error::{Error, Result};
use crate::exec::Execution;

pub use connection::{build_connection, verify_compatibility, ConnectionCoefficients};
pub use fields::{
    assemble, boost_transform, check_closedness, extract_em, quantization_coefficients, quantization_form,
};
pub use model::{potential_to_field, Antisym4, SpacetimeModel};
pub use study::{analytic, convergence_slope, refinement_study, RefinementRow};

/// Regular grid in `(t, x¹, x², x³)`, stored with `t` varying slowest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid4 {
    origin: [f64; 4],
    spacing: [f64; 4],
    shape: [usize; 4],
}

impl Grid4 {
    pub const MIN_POINTS: usize = 3;

    pub fn new(origin: [f64; 4], spacing: [f64; 4], shape: [usize; 4]) -> Result<Self> {
        for axis in 0..4 {
            if !(spacing[axis] > 0.0 && spacing[axis].is_finite()) {
                return Err(Error::NonPositiveStep(spacing[axis]));
            }
            if shape[axis] < Self::MIN_POINTS {
                return Err(Error::AxisTooShort { axis, points: shape[axis], required: Self::MIN_POINTS });
            }
        }
        Ok(Self { origin, spacing, shape })
    }

    /// `n⁴` points covering `[0, 1]⁴`.
    pub fn unit_cube(n: usize) -> Result<Self> {
        let h = 1.0 / (n.max(2) - 1) as f64;
        Self::new([0.0; 4], [h; 4], [n; 4])
    }

    pub fn origin(&self) -> [f64; 4] {
        self.origin
    }

    pub fn spacing(&self) -> [f64; 4] {
        self.spacing
    }

    pub fn shape(&self) -> [usize; 4] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest spacing.
    pub fn h(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    fn strides(&self) -> [usize; 4] {
        let [_, n1, n2, n3] = self.shape;
        [n1 * n2 * n3, n2 * n3, n3, 1]
    }

    pub fn index(&self, m: [usize; 4]) -> usize {
        let s = self.strides();
        (0..4).map(|a| m[a] * s[a]).sum()
    }

    pub fn multi_index(&self, idx: usize) -> [usize; 4] {
        let s = self.strides();
        let mut out = [0; 4];
        let mut rest = idx;
        for a in 0..4 {
            out[a] = rest / s[a];
            rest %= s[a];
        }
        out
    }

    pub fn point(&self, idx: usize) -> [f64; 4] {
        let m = self.multi_index(idx);
        std::array::from_fn(|a| self.origin[a] + m[a] as f64 * self.spacing[a])
    }

    /// Number of grid steps to the nearest face.
    pub fn boundary_distance(&self, idx: usize) -> usize {
        let m = self.multi_index(idx);
        (0..4).map(|a| m[a].min(self.shape[a] - 1 - m[a])).min().unwrap()
    }

    pub(crate) fn sample<T, F>(&self, exec: Execution, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn([f64; 4]) -> T + Sync + Send,
    {
        exec.map(self.len(), |i| f(self.point(i)))
    }

    fn require(&self, points: usize) -> Result<()> {
        for axis in 0..4 {
            if self.shape[axis] < points {
                return Err(Error::AxisTooShort { axis, points: self.shape[axis], required: points });
            }
        }
        Ok(())
    }

    /// Second-order centered difference along `axis`, first-order one-sided
    /// on the faces.
    pub(crate) fn d2(&self, idx: usize, axis: usize, f: impl Fn(usize) -> f64) -> f64 {
        let i = self.multi_index(idx)[axis];
        let n = self.shape[axis];
        let s = self.strides()[axis];
        let h = self.spacing[axis];
        if i == 0 {
            (f(idx + s) - f(idx)) / h
        } else if i == n - 1 {
            (f(idx) - f(idx - s)) / h
        } else {
            (f(idx + s) - f(idx - s)) / (2.0 * h)
        }
    }

    /// Fourth-order centered difference where two neighbours exist on both
    /// sides; lower-order stencils closer to the faces. Samples enter through
    /// differences so constant fields give exactly zero.
    pub(crate) fn d4(&self, idx: usize, axis: usize, f: impl Fn(usize) -> f64) -> f64 {
        let i = self.multi_index(idx)[axis];
        let n = self.shape[axis];
        let s = self.strides()[axis];
        let h = self.spacing[axis];
        if i >= 2 && i + 2 < n {
            (8.0 * (f(idx + s) - f(idx - s)) - (f(idx + 2 * s) - f(idx - 2 * s))) / (12.0 * h)
        } else if i >= 1 && i + 1 < n {
            (f(idx + s) - f(idx - s)) / (2.0 * h)
        } else if i == 0 {
            (4.0 * (f(idx + s) - f(idx)) - (f(idx + 2 * s) - f(idx))) / (2.0 * h)
        } else {
            (4.0 * (f(idx) - f(idx - s)) - (f(idx) - f(idx - 2 * s))) / (2.0 * h)
        }
    }
}

/// Pointwise residuals summarized separately for the interior and for points
/// near the faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub interior_max: f64,
    pub interior_mean: f64,
    pub boundary_max: f64,
    pub boundary_mean: f64,
    /// Maximum over interior points in the middle half of every axis. The
    /// region is fixed in physical coordinates, so it is the quantity to
    /// compare across refinements.
    pub core_max: f64,
    /// Points with at least this many grid steps to every face count as
    /// interior.
    pub margin: usize,
}

impl ResidualReport {
    pub(crate) fn from_points(grid: &Grid4, values: &[f64], margin: usize) -> Self {
        let (mut imax, mut isum, mut icount) = (0.0f64, 0.0, 0usize);
        let (mut bmax, mut bsum, mut bcount) = (0.0f64, 0.0, 0usize);
        let mut cmax = 0.0f64;
        let shape = grid.shape();
        let in_core = |i: usize| {
            grid.multi_index(i).iter().zip(shape).all(|(&m, n)| {
                let s = m as f64 / (n - 1) as f64;
                (0.25 - 1e-12..=0.75 + 1e-12).contains(&s)
            })
        };
        for (i, v) in values.iter().enumerate() {
            if grid.boundary_distance(i) >= margin {
                if in_core(i) {
                    cmax = cmax.max(*v);
                }
                imax = imax.max(*v);
                isum += v;
                icount += 1;
            } else {
                bmax = bmax.max(*v);
                bsum += v;
                bcount += 1;
            }
        }
        Self {
            interior_max: imax,
            interior_mean: if icount > 0 { isum / icount as f64 } else { 0.0 },
            boundary_max: bmax,
            boundary_mean: if bcount > 0 { bsum / bcount as f64 } else { 0.0 },
            core_max: cmax,
            margin,
        }
    }

    pub fn max(&self) -> f64 {
        self.interior_max.max(self.boundary_max)
    }
}
