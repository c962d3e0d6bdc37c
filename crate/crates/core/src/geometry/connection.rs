use super::{Grid4, ResidualReport, SpacetimeModel};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Symmetric pair `(μ, ν)` to one of ten slots.
fn slot(mu: usize, nu: usize) -> usize {
    let (a, b) = if mu <= nu { (mu, nu) } else { (nu, mu) };
    4 * a - a * (a.saturating_sub(1)) / 2 + (b - a)
}

/// `Γ^λ_{μν}` at every grid point.
///
/// Only `λ = 1, 2, 3` are stored, each as the ten entries of a symmetric
/// 4×4 array, so torsion-freeness and `Γ⁰_{μν} = 0` hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    grid: Grid4,
    values: Vec<[[f64; 10]; 3]>,
}

impl ConnectionCoefficients {
    pub fn grid(&self) -> &Grid4 {
        &self.grid
    }

    pub fn get(&self, idx: usize, lambda: usize, mu: usize, nu: usize) -> f64 {
        if lambda == 0 {
            0.0
        } else {
            self.values[idx][lambda - 1][slot(mu, nu)]
        }
    }

    /// Overwrite `Γ^λ_{μν}` (and `Γ^λ_{νμ}`).
    ///
    /// # Panics
    /// If `lambda` is not a spatial index; the time row is fixed at zero.
    pub fn set(&mut self, idx: usize, lambda: usize, mu: usize, nu: usize, value: f64) {
        assert!((1..4).contains(&lambda), "only spatial rows of the connection are stored");
        self.values[idx][lambda - 1][slot(mu, nu)] = value;
    }

    /// `Γ_{μν,k} = g_kl Γ^l_{μν}` for spatial `k`.
    pub fn lowered(&self, model: &SpacetimeModel, idx: usize, mu: usize, nu: usize, k: usize) -> f64 {
        let g = &model.metric()[idx];
        (1..4).map(|l| g[(k - 1, l - 1)] * self.get(idx, l, mu, nu)).sum()
    }
}

/// Metric-compatible, time-preserving, torsion-free connection with the
/// model's `Φ`.
pub fn build_connection(model: &SpacetimeModel, exec: Execution) -> ConnectionCoefficients {
    let grid = *model.grid();
    let metric = model.metric();
    let field = model.field();
    let values = exec.map(grid.len(), |idx| {
        // dg[μ][i][j] = ∂_μ g_ij, spatial i, j in 0..3.
        let mut dg = [[[0.0; 3]; 3]; 4];
        for (mu, d) in dg.iter_mut().enumerate() {
            for i in 0..3 {
                for j in i..3 {
                    let v = grid.d2(idx, mu, |p| metric[p][(i, j)]);
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
        }
        let phi = &field[idx];
        // Lowered coefficients low[slot][k].
        let mut low = [[0.0; 3]; 10];
        for k in 0..3 {
            low[slot(0, 0)][k] = phi.get(0, k + 1);
            for i in 0..3 {
                low[slot(i + 1, 0)][k] = 0.5 * (dg[0][i][k] + phi.get(i + 1, k + 1));
                for j in i..3 {
                    low[slot(i + 1, j + 1)][k] = 0.5 * (dg[i + 1][j][k] + dg[j + 1][i][k] - dg[k + 1][i][j]);
                }
            }
        }
        let ginv = &model.inverse_metric()[idx];
        let mut raised = [[0.0; 10]; 3];
        for (l, row) in raised.iter_mut().enumerate() {
            for (s, value) in row.iter_mut().enumerate() {
                *value = (0..3).map(|k| ginv[(l, k)] * low[s][k]).sum();
            }
        }
        raised
    });
    ConnectionCoefficients { grid, values }
}

/// Residual of `∂_μ g_ij − Γ_{μi,j} − Γ_{μj,i}` with `∂_μ g_ij` from a
/// fourth-order stencil, maximized over `μ` and `i ≤ j` at each point.
/// Interior points have two grid steps to every face.
///
/// The time row needs no check: it is not representable in
/// [`ConnectionCoefficients`].
pub fn verify_compatibility(
    connection: &ConnectionCoefficients,
    model: &SpacetimeModel,
    exec: Execution,
) -> Result<ResidualReport> {
    let grid = *model.grid();
    if connection.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    grid.require(5)?;
    let metric = model.metric();
    let residuals = exec.map(grid.len(), |idx| {
        let mut worst = 0.0f64;
        for mu in 0..4 {
            for i in 1..4 {
                for j in i..4 {
                    let dg = grid.d4(idx, mu, |p| metric[p][(i - 1, j - 1)]);
                    let r = dg
                        - connection.lowered(model, idx, mu, i, j)
                        - connection.lowered(model, idx, mu, j, i);
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    });
    Ok(ResidualReport::from_points(&grid, &residuals, 2))
}
