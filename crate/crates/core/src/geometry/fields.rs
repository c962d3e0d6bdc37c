use nalgebra::{Matrix3, Vector3};

use super::{Antisym4, ResidualReport, SpacetimeModel};
use crate::error::Result;
use crate::exec::Execution;

/// Split `Φ` into `E_i = Φ_0i` and `B_i = ½ε_ijk Φ_jk`, i.e.
/// `B = (Φ_23, Φ_31, Φ_12)`.
pub fn extract_em(phi: &Antisym4) -> (Vector3<f64>, Vector3<f64>) {
    let e = Vector3::new(phi.get(0, 1), phi.get(0, 2), phi.get(0, 3));
    let b = Vector3::new(phi.get(2, 3), phi.get(3, 1), phi.get(1, 2));
    (e, b)
}

/// Inverse of [`extract_em`].
pub fn assemble(e: &Vector3<f64>, b: &Vector3<f64>) -> Antisym4 {
    Antisym4::from_components([e.x, e.y, e.z, b.z, -b.y, b.x])
}

/// Special Galilei boost with velocity `v` on flat fibers:
/// `E′ = E + v × B`, `B′ = B`.
pub fn boost_transform(e: &Vector3<f64>, b: &Vector3<f64>, v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    (e + v.cross(b), *b)
}

/// Cyclic sum `∂_μΦ_νσ + ∂_νΦ_σμ + ∂_σΦ_μν` over the four index triples,
/// with fourth-order stencils. Interior points have three grid steps to every
/// face, so the stencil only reads centered samples of a potential-derived
/// `Φ`.
pub fn check_closedness(model: &SpacetimeModel, exec: Execution) -> Result<ResidualReport> {
    let grid = *model.grid();
    grid.require(5)?;
    let phi = model.field();
    let residuals = exec.map(grid.len(), |idx| {
        let d = |axis: usize, a: usize, b: usize| grid.d4(idx, axis, |p| phi[p].get(a, b));
        [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
            .iter()
            .map(|&(m, n, s)| (d(m, n, s) + d(n, s, m) + d(s, m, n)).abs())
            .fold(0.0, f64::max)
    });
    Ok(ResidualReport::from_points(&grid, &residuals, 3))
}

/// `a₀ = −½ g_ij yⁱ yʲ + A₀`, `a_i = g_ij yʲ + A_i`.
pub fn quantization_coefficients(g: &Matrix3<f64>, potential: [f64; 4], y: &Vector3<f64>) -> (f64, Vector3<f64>) {
    let gy = g * y;
    let a0 = -0.5 * y.dot(&gy) + potential[0];
    let a = gy + Vector3::new(potential[1], potential[2], potential[3]);
    (a0, a)
}

/// [`quantization_coefficients`] at grid point `idx`, with `A = 0` when the
/// model carries no potential.
pub fn quantization_form(model: &SpacetimeModel, idx: usize, y: &Vector3<f64>) -> (f64, Vector3<f64>) {
    let a = model.potential().map_or([0.0; 4], |p| p[idx]);
    quantization_coefficients(&model.metric()[idx], a, y)
}
