use super::{build_connection, check_closedness, verify_compatibility, Grid4, SpacetimeModel};
use crate::error::Result;
use crate::exec::Execution;

/// Smooth test fields on `[0, 1]⁴`.
pub mod analytic {
    use nalgebra::Matrix3;

    /// Time-dependent, non-diagonal, diagonally dominant spatial metric.
    pub fn metric(p: [f64; 4]) -> Matrix3<f64> {
        let [t, x, y, z] = p;
        let g11 = 1.0 + 0.2 * (x + t).sin();
        let g22 = 1.0 + 0.2 * (y + 0.5 * t).cos();
        let g33 = 1.0 + 0.1 * (z + t).sin() + 0.3 * x * y;
        let g12 = 0.1 * y.sin() * z.cos();
        let g23 = 0.1 * (x * z).sin();
        let g13 = 0.05 * (t + x + y).cos();
        Matrix3::new(g11, g12, g13, g12, g22, g23, g13, g23, g33)
    }

    /// Covariant potential `A_μ` whose mixed third derivatives do not vanish.
    pub fn potential(p: [f64; 4]) -> [f64; 4] {
        let [t, x, y, z] = p;
        [
            (x + 2.0 * y).sin() * (-t).exp(),
            (t * z).cos() + (y - z).sin(),
            (x * t).sin() + 0.5 * (2.0 * z + x).cos(),
            (x + y + t).sin() * (1.0 + z * z),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementRow {
    pub points: usize,
    pub h: f64,
    /// Maximum of the compatibility residual over the core `[¼, ¾]⁴`.
    pub compatibility: f64,
    /// Maximum of the closedness residual of `Φ = dA` over the core.
    pub closedness: f64,
}

/// Build the connection for the [`analytic`] fields on `n⁴` unit-cube grids
/// and record the residuals on the fixed core region.
pub fn refinement_study(sizes: &[usize], exec: Execution) -> Result<Vec<RefinementRow>> {
    sizes
        .iter()
        .map(|&n| {
            let grid = Grid4::unit_cube(n)?;
            let model = SpacetimeModel::from_potential_fn(grid, analytic::metric, analytic::potential, exec)?;
            let gamma = build_connection(&model, exec);
            let compatibility = verify_compatibility(&gamma, &model, exec)?.core_max;
            let closedness = check_closedness(&model, exec)?.core_max;
            Ok(RefinementRow { points: n, h: grid.h(), compatibility, closedness })
        })
        .collect()
}

/// Least-squares slope of `ln r` against `ln h`.
pub fn convergence_slope(hs: &[f64], residuals: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
