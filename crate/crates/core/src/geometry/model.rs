use nalgebra::{Cholesky, Matrix3};

use super::Grid4;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Antisymmetric 4×4 array stored by its six independent components
/// `(01, 02, 03, 12, 13, 23)`, so `Φ_μν = −Φ_νμ` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Antisym4([f64; 6]);

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Antisym4 {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Components in the order `(01, 02, 03, 12, 13, 23)`.
    pub fn from_components(c: [f64; 6]) -> Self {
        Self(c)
    }

    /// Build from the entries above the diagonal of `f(μ, ν)`.
    pub fn from_fn(f: impl Fn(usize, usize) -> f64) -> Self {
        Self(std::array::from_fn(|p| f(PAIRS[p].0, PAIRS[p].1)))
    }

    pub fn components(&self) -> [f64; 6] {
        self.0
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        match mu.cmp(&nu) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.0[pair(mu, nu)],
            std::cmp::Ordering::Greater => -self.0[pair(nu, mu)],
        }
    }

    /// Set `Φ_μν = v` and with it `Φ_νμ = −v`.
    ///
    /// # Panics
    /// If `mu == nu` or an index exceeds 3.
    pub fn set(&mut self, mu: usize, nu: usize, v: f64) {
        assert!(mu != nu && mu < 4 && nu < 4, "invalid antisymmetric index ({mu}, {nu})");
        if mu < nu {
            self.0[pair(mu, nu)] = v;
        } else {
            self.0[pair(nu, mu)] = -v;
        }
    }
}

fn pair(mu: usize, nu: usize) -> usize {
    PAIRS.iter().position(|&p| p == (mu, nu)).expect("ordered pair")
}

/// Sampled `g_ij`, `Φ_μν` and optionally the potential `A_μ` on a [`Grid4`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeModel {
    grid: Grid4,
    metric: Vec<Matrix3<f64>>,
    inverse: Vec<Matrix3<f64>>,
    field: Vec<Antisym4>,
    potential: Option<Vec<[f64; 4]>>,
}

impl SpacetimeModel {
    /// Validates that every `g_ij` sample is exactly symmetric and passes a
    /// Cholesky factorization.
    pub fn new(grid: Grid4, metric: Vec<Matrix3<f64>>, field: Vec<Antisym4>) -> Result<Self> {
        for len in [metric.len(), field.len()] {
            if len != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), got: len });
            }
        }
        let inverse = metric
            .iter()
            .enumerate()
            .map(|(i, g)| {
                if *g != g.transpose() {
                    return Err(Error::NotSymmetric(i));
                }
                Cholesky::new(*g).map(|c| c.inverse()).ok_or(Error::NotPositiveDefinite(i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, metric, inverse, field, potential: None })
    }

    pub fn from_fn<G, F>(grid: Grid4, metric: G, field: F, exec: Execution) -> Result<Self>
    where
        G: Fn([f64; 4]) -> Matrix3<f64> + Sync + Send,
        F: Fn([f64; 4]) -> Antisym4 + Sync + Send,
    {
        Self::new(grid, grid.sample(exec, metric), grid.sample(exec, field))
    }

    /// `Φ = dA` from a sampled potential.
    pub fn from_potential(grid: Grid4, metric: Vec<Matrix3<f64>>, potential: Vec<[f64; 4]>, exec: Execution) -> Result<Self> {
        let field = potential_to_field(&grid, &potential, exec)?;
        let mut model = Self::new(grid, metric, field)?;
        model.potential = Some(potential);
        Ok(model)
    }

    pub fn from_potential_fn<G, A>(grid: Grid4, metric: G, potential: A, exec: Execution) -> Result<Self>
    where
        G: Fn([f64; 4]) -> Matrix3<f64> + Sync + Send,
        A: Fn([f64; 4]) -> [f64; 4] + Sync + Send,
    {
        Self::from_potential(grid, grid.sample(exec, metric), grid.sample(exec, potential), exec)
    }

    pub fn grid(&self) -> &Grid4 {
        &self.grid
    }

    pub fn metric(&self) -> &[Matrix3<f64>] {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &[Matrix3<f64>] {
        &self.inverse
    }

    pub fn field(&self) -> &[Antisym4] {
        &self.field
    }

    pub fn potential(&self) -> Option<&[[f64; 4]]> {
        self.potential.as_deref()
    }
}

/// `Φ_μν = ∂_μ A_ν − ∂_ν A_μ` by centered differences.
pub fn potential_to_field(grid: &Grid4, potential: &[[f64; 4]], exec: Execution) -> Result<Vec<Antisym4>> {
    if potential.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: potential.len() });
    }
    Ok(exec.map(grid.len(), |idx| {
        Antisym4::from_fn(|mu, nu| {
            grid.d2(idx, mu, |j| potential[j][nu]) - grid.d2(idx, nu, |j| potential[j][mu])
        })
    }))
}
