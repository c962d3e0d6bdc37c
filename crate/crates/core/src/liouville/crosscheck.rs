use num_complex::Complex64;

use super::{integrate_with, CMatrix, DensityKernel, Liouvillian};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::Grid1D;
use crate::propagate::{damped_evolve, DetectorSpec};
use crate::wavefunction::WaveFunction;

/// Largest grid on which dense `n × n` kernels are built.
pub const MAX_KERNEL_POINTS: usize = 256;

/// Whether the jump term `FρF†` is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Drop the jump term: the trace is the probability of no detection so
    /// far, matching the damped Schrödinger evolution.
    Undetected,
    /// Keep the jump term: trace preserving.
    Complete,
}

/// Free particle on a grid with a detector `F†F = κ·Σ_j w_j |x_j⟩⟨x_j|`,
/// represented in the discrete momentum basis where `H` is diagonal.
///
/// The basis vectors are `|k_m⟩ = n^{-1/2} Σ_j e^{ik_m x_j} |x_j⟩` in centered
/// order, and the detector is a short sum of rank-one terms, so one right-hand
/// side costs `O(S·n²)` for `S` detector sites.
#[derive(Debug, Clone)]
pub struct GridLiouvillian {
    grid: Grid1D,
    energies: Vec<f64>,
    sites: Vec<Site>,
    channel: Channel,
    exec: Execution,
    rate_bound: f64,
}

#[derive(Debug, Clone)]
struct Site {
    /// `⟨k_m|x_j⟩` for all `m`.
    u: Vec<Complex64>,
    rate: f64,
}

impl GridLiouvillian {
    pub fn new(grid: Grid1D, detector: &DetectorSpec, channel: Channel, exec: Execution) -> Result<Self> {
        if grid.len() > MAX_KERNEL_POINTS {
            return Err(Error::GridTooLarge { n: grid.len(), max: MAX_KERNEL_POINTS });
        }
        detector.validate()?;
        let energies: Vec<f64> = grid.momenta().map(|k| 0.5 * k * k).collect();
        let sites: Vec<Site> = detector
            .weights(&grid)
            .into_iter()
            .map(|(j, w)| Site { u: basis_column(&grid, j), rate: detector.kappa * w })
            .collect();
        let e_max = energies.iter().cloned().fold(0.0, f64::max);
        let f_max = sites.iter().map(|s| s.rate).fold(0.0, f64::max);
        Ok(Self { grid, energies, sites, channel, exec, rate_bound: e_max.max(f_max) })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Unitary `U_mj = ⟨k_m|x_j⟩` from the position to the momentum basis.
    pub fn basis_change(&self) -> CMatrix {
        let n = self.grid.len();
        CMatrix::from_fn(n, n, |m, j| self.basis_entry(m, j))
    }

    fn basis_entry(&self, m: usize, j: usize) -> Complex64 {
        let n = self.grid.len() as f64;
        Complex64::from_polar(1.0 / n.sqrt(), -self.grid.k(m) * self.grid.x(j))
    }

    /// Momentum-basis operator of a position kernel.
    pub fn from_kernel(&self, kernel: &DensityKernel) -> Result<CMatrix> {
        if kernel.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let u = self.basis_change();
        Ok(&u * kernel.to_operator() * u.adjoint())
    }

    pub fn to_kernel(&self, rho: &CMatrix) -> Result<DensityKernel> {
        let u = self.basis_change();
        DensityKernel::from_operator(self.grid, &(u.adjoint() * rho * &u))
    }

    /// Momentum-basis projector onto a normalized copy of `wf`.
    pub fn pure_state(&self, wf: &WaveFunction) -> Result<CMatrix> {
        if wf.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let norm = wf.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let scale = self.grid.dk().sqrt() / norm;
        let phi: Vec<Complex64> = wf.to_momentum().amplitudes().iter().map(|a| a * scale).collect();
        let n = phi.len();
        Ok(CMatrix::from_fn(n, n, |i, j| phi[i] * phi[j].conj()))
    }
}

fn basis_column(grid: &Grid1D, j: usize) -> Vec<Complex64> {
    let n = grid.len() as f64;
    let x = grid.x(j);
    grid.momenta().map(|k| Complex64::from_polar(1.0 / n.sqrt(), -k * x)).collect()
}

impl Liouvillian for GridLiouvillian {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn rhs(&self, _t: f64, rho: &CMatrix) -> CMatrix {
        let n = self.grid.len();
        let i = Complex64::i();
        // v_s = ρ u_s and r_s = u_s† ρ (stored as a column).
        let v: Vec<_> = self.sites.iter().map(|s| rho * nalgebra::DVector::from_column_slice(&s.u)).collect();
        let r: Vec<_> = self
            .sites
            .iter()
            .map(|s| {
                let conj: Vec<Complex64> = s.u.iter().map(|z| z.conj()).collect();
                rho.tr_mul(&nalgebra::DVector::from_column_slice(&conj))
            })
            .collect();
        // s_ab = u_a† ρ u_b, weighted by √(rate_a·rate_b).
        let jump: Vec<Vec<Complex64>> = match self.channel {
            Channel::Undetected => Vec::new(),
            Channel::Complete => self
                .sites
                .iter()
                .enumerate()
                .map(|(a, sa)| {
                    self.sites
                        .iter()
                        .map(|sb| {
                            let s: Complex64 = r[a].iter().zip(&sb.u).map(|(x, y)| x * y).sum();
                            s * (sa.rate * sb.rate).sqrt()
                        })
                        .collect()
                })
                .collect(),
        };

        let src = rho.as_slice();
        let mut out = CMatrix::zeros(n, n);
        self.exec.for_each_chunk(out.as_mut_slice(), n, |col, dst| {
            let e_col = self.energies[col];
            let rho_col = &src[col * n..(col + 1) * n];
            let mut a = Vec::with_capacity(self.sites.len());
            let mut b = Vec::with_capacity(self.sites.len());
            let mut g = Vec::with_capacity(jump.len());
            for (s, site) in self.sites.iter().enumerate() {
                a.push(r[s][col] * (-0.5 * site.rate));
                b.push(site.u[col].conj() * (-0.5 * site.rate));
            }
            for row in &jump {
                g.push(row.iter().zip(&self.sites).map(|(w, sb)| w * sb.u[col].conj()).sum::<Complex64>());
            }
            for m in 0..n {
                let mut acc = -i * (self.energies[m] - e_col) * rho_col[m];
                for (s, site) in self.sites.iter().enumerate() {
                    acc += a[s] * site.u[m] + b[s] * v[s][m];
                }
                for (s, site) in self.sites.iter().enumerate().take(g.len()) {
                    acc += g[s] * site.u[m];
                }
                dst[m] = acc;
            }
        });
        out
    }

    fn rate_bound(&self) -> f64 {
        self.rate_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub times: Vec<f64>,
    /// `Tr ρ_t` from the Liouville integration without the jump term.
    pub traces: Vec<f64>,
    /// `‖ψ_t‖²` from the damped Schrödinger evolution.
    pub norms_sqr: Vec<f64>,
    pub max_deviation: f64,
}

/// Integrate the Liouville equation for `ρ₀ = |ψ⟩⟨ψ|` without the jump term
/// and compare `Tr ρ_t` with `‖ψ_t‖²` from [`damped_evolve`] on the same
/// grid. The state is normalized first.
pub fn eeqt_crosscheck(
    wf: &WaveFunction,
    detector: &DetectorSpec,
    dt: f64,
    steps: usize,
    exec: Execution,
) -> Result<CrosscheckReport> {
    let model = GridLiouvillian::new(*wf.grid(), detector, Channel::Undetected, exec)?;
    let rho0 = model.pure_state(wf)?;
    let psi = wf.clone().scaled(1.0 / wf.norm());
    let record = damped_evolve(&psi, detector, dt, steps)?;

    let mut traces = Vec::with_capacity(steps + 1);
    integrate_with(&rho0, &model, dt, steps, |_, _, rho| traces.push(rho.trace().re))?;

    let max_deviation = traces
        .iter()
        .zip(&record.norms_sqr)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CrosscheckReport { times: record.times, traces, norms_sqr: record.norms_sqr, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::max_abs;
    use crate::liouville::{DensityMatrix, LindbladModel};
    use crate::packet::GaussianPacket;
    use crate::propagate::Regularization;

    fn small() -> (Grid1D, DetectorSpec) {
        let g = Grid1D::new(-4.0, 4.0, 16).unwrap();
        let d = DetectorSpec::new(0.3, 2.0, Regularization::Gaussian { width: 0.6 }).unwrap();
        (g, d)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
        &a + a.adjoint()
    }

    /// Dense model in the same momentum basis: `H = diag(k²/2)` and
    /// `F = U·diag(√(κ w_j))·U†`.
    fn dense(model: &GridLiouvillian, detector: &DetectorSpec) -> LindbladModel {
        let g = *model.grid();
        let n = g.len();
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            g.momenta().map(|k| Complex64::new(0.5 * k * k, 0.0)),
        ));
        let mut diag = vec![Complex64::new(0.0, 0.0); n];
        for (j, w) in detector.weights(&g) {
            diag[j] = Complex64::new((detector.kappa * w).sqrt(), 0.0);
        }
        let u = model.basis_change();
        let f = &u * CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) * u.adjoint();
        LindbladModel::new(h, f).unwrap()
    }

    #[test]
    fn basis_is_unitary() {
        let (g, d) = small();
        let m = GridLiouvillian::new(g, &d, Channel::Complete, Execution::Sequential).unwrap();
        let u = m.basis_change();
        assert!(max_abs(&(&u * u.adjoint() - CMatrix::identity(16, 16))) < 1e-13);
    }

    #[test]
    fn structured_rhs_matches_dense_model() {
        let (g, d) = small();
        let rho = random_hermitian(16, 7);
        let full = GridLiouvillian::new(g, &d, Channel::Complete, Execution::Sequential).unwrap();
        let reference = dense(&full, &d);
        let expected = reference.rhs(0.0, &rho);
        assert!(max_abs(&(full.rhs(0.0, &rho) - &expected)) < 1e-12);

        let undetected = GridLiouvillian::new(g, &d, Channel::Undetected, Execution::Sequential).unwrap();
        let f = reference.detector();
        let jump = f * &rho * f.adjoint();
        assert!(max_abs(&(undetected.rhs(0.0, &rho) - (expected - jump))) < 1e-12);
    }

    #[test]
    fn execution_modes_agree() {
        let (g, d) = small();
        let rho = random_hermitian(16, 3);
        let a = GridLiouvillian::new(g, &d, Channel::Complete, Execution::Sequential).unwrap();
        let b = GridLiouvillian::new(g, &d, Channel::Complete, Execution::Parallel).unwrap();
        assert_eq!(a.rhs(0.0, &rho), b.rhs(0.0, &rho));
    }

    #[test]
    fn pure_state_matches_kernel() {
        let g = Grid1D::new(-8.0, 8.0, 64).unwrap();
        let wf = GaussianPacket::new(-1.0, 1.0, 1.0, 0.0).unwrap().sample(&g).unwrap();
        let d = DetectorSpec::point(0.0, 1.0).unwrap();
        let m = GridLiouvillian::new(g, &d, Channel::Complete, Execution::Sequential).unwrap();
        let via_kernel = m.from_kernel(&DensityKernel::pure(&wf).unwrap()).unwrap();
        let direct = m.pure_state(&wf).unwrap();
        assert!(max_abs(&(via_kernel - &direct)) < 1e-12);
        assert!((direct.trace().re - 1.0).abs() < 1e-12);
        let back = m.to_kernel(&direct).unwrap();
        assert!((back.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_channel_keeps_trace_and_positivity() {
        let g = Grid1D::new(-8.0, 8.0, 32).unwrap();
        let wf = GaussianPacket::new(-2.0, 1.0, 1.0, 0.0).unwrap().sample(&g).unwrap();
        let d = DetectorSpec::point(0.0, 2.0).unwrap();
        let m = GridLiouvillian::new(g, &d, Channel::Complete, Execution::Sequential).unwrap();
        let rho0 = m.pure_state(&wf).unwrap();
        let mut drift = 0.0f64;
        let last = integrate_with(&rho0, &m, 5e-3, 400, |_, _, rho| {
            drift = drift.max((rho.trace().re - 1.0).abs());
        })
        .unwrap();
        assert!(drift < 1e-10);
        let state = DensityMatrix::new((&last + last.adjoint()) * Complex64::new(0.5, 0.0)).unwrap();
        assert!(state.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn grid_limit() {
        let g = Grid1D::new(-20.0, 20.0, 512).unwrap();
        let d = DetectorSpec::point(0.0, 8.0).unwrap();
        assert_eq!(
            GridLiouvillian::new(g, &d, Channel::Undetected, Execution::Sequential).unwrap_err(),
            Error::GridTooLarge { n: 512, max: MAX_KERNEL_POINTS }
        );
        let wf = WaveFunction::zeros(g);
        assert!(eeqt_crosscheck(&wf, &d, 1e-4, 1, Execution::Sequential).is_err());
    }

    #[test]
    fn short_crosscheck() {
        let g = Grid1D::new(-10.0, 10.0, 64).unwrap();
        let wf = GaussianPacket::new(-2.0, 1.0, 2.0, 0.0).unwrap().sample(&g).unwrap();
        let d = DetectorSpec::point(0.0, 4.0).unwrap();
        let r = eeqt_crosscheck(&wf, &d, 1.5e-3, 1000, Execution::default()).unwrap();
        assert_eq!(r.traces.len(), r.norms_sqr.len());
        assert!(*r.traces.last().unwrap() < 0.9);
        assert!(r.max_deviation < 1e-3, "deviation {}", r.max_deviation);
    }
}
