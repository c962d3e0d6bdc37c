use nalgebra::DVector;
use num_complex::Complex64;
use toa_core::eeqt::{kappa_sweep, EeqtSettings};
use toa_core::liouville::{integrate, integrate_with, max_abs, CMatrix, Channel, GridLiouvillian};
use toa_core::{
    eeqt_crosscheck, DensityKernel, DensityMatrix, DetectorSpec, Execution, GaussianPacket, Grid1D, LindbladModel,
    WaveFunction,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Deterministic pseudo-random complex matrix.
fn random_matrix(n: usize, seed: u64) -> CMatrix {
    let mut s = seed;
    let mut next = move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    CMatrix::from_fn(n, n, |_, _| c(next(), next()))
}

fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let a = random_matrix(n, seed);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

fn random_state(n: usize, seed: u64) -> DensityMatrix {
    let v = random_matrix(n, seed);
    DensityMatrix::pure_state(v.column(0).as_slice()).unwrap()
}

/// Column-stacking vectorization: vec(AXB) = (Bᵀ ⊗ A) vec(X).
fn superoperator(h: &CMatrix, f: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    let ff = f.adjoint() * f;
    let i = c(0.0, 1.0);
    (id.kronecker(h) - h.transpose().kronecker(&id)) * (-i) + f.conjugate().kronecker(f)
        - (id.kronecker(&ff) + ff.transpose().kronecker(&id)) * c(0.5, 0.0)
}

fn vectorize(m: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

#[test]
fn trajectories_match_superoperator_exponential() {
    for (n, seed) in [(2, 1), (4, 2), (8, 3)] {
        let h = random_hermitian(n, seed);
        let f = random_matrix(n, seed + 100);
        let model = LindbladModel::new(h.clone(), f.clone()).unwrap();
        let rho0 = random_state(n, seed + 200);
        let t = 1.0;
        let steps = 2000;
        let traj = integrate(&rho0, &model, t / steps as f64, steps).unwrap();
        let oracle = (superoperator(&h, &f) * c(t, 0.0)).exp() * vectorize(rho0.matrix());
        let got = vectorize(traj.last().matrix());
        let err = (got - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "n = {n}: {err}");
    }
}

#[test]
fn reversible_case_is_unitary_conjugation() {
    let n = 4;
    let h = random_hermitian(n, 11) * c(3.0, 0.0);
    let model = LindbladModel::unitary(h.clone()).unwrap();
    let rho0 = random_state(n, 12);
    let traj = integrate(&rho0, &model, 1e-3, 1000).unwrap();
    let u = (h * c(0.0, -1.0)).exp();
    let expected = &u * rho0.matrix() * u.adjoint();
    assert!(max_abs(&(traj.last().matrix() - expected)) < 1e-8);
    assert!(traj.last().purity_defect() < 1e-6);
}

#[test]
fn trace_hermiticity_and_positivity_along_trajectories() {
    for n in [2, 5, 16] {
        let h = random_hermitian(n, 40 + n as u64);
        let f = random_matrix(n, 50 + n as u64) * c(1.5, 0.0);
        let model = LindbladModel::new(h, f).unwrap();
        let dt = 0.09 / toa_core::Liouvillian::rate_bound(&model);
        let rho0 = random_state(n, 60 + n as u64);
        let traj = integrate(&rho0, &model, dt, 1000).unwrap();
        assert!(traj.max_trace_drift() < 1e-9, "n = {n}: drift {}", traj.max_trace_drift());
        assert!(traj.max_hermiticity_error() < 1e-10);
        assert!(traj.min_eigenvalue() >= -1e-8, "n = {n}: {}", traj.min_eigenvalue());
    }
}

#[test]
fn rhs_is_traceless_and_hermitian() {
    let n = 6;
    let model = LindbladModel::new(random_hermitian(n, 1), random_matrix(n, 2)).unwrap();
    let rho = random_state(n, 3);
    let r = toa_core::liouville_rhs(&rho, &model).unwrap();
    assert!(r.trace().norm() < 1e-12);
    assert!(max_abs(&(&r - r.adjoint())) < 1e-12);
}

#[test]
fn coherence_decays_at_half_rate() {
    let kappa: f64 = 1.7;
    let f = CMatrix::from_diagonal(&DVector::from_vec(vec![c(kappa.sqrt(), 0.0), c(0.0, 0.0)]));
    let model = LindbladModel::new(CMatrix::zeros(2, 2), f).unwrap();
    let s = 0.5f64.sqrt();
    let rho0 = DensityMatrix::pure_state(&[c(s, 0.0), c(s, 0.0)]).unwrap();
    let traj = integrate(&rho0, &model, 1e-3, 2000).unwrap();
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let expected = 0.5 * (-kappa * t / 2.0).exp();
        assert!((state.matrix()[(0, 1)].norm() - expected).abs() < 1e-6);
    }
}

#[test]
fn identity_kernel_acts_as_identity() {
    let g = Grid1D::new(-5.0, 5.0, 32).unwrap();
    let k = DensityKernel::new(g, CMatrix::identity(32, 32) * c(1.0 / g.dx(), 0.0)).unwrap();
    let wf = GaussianPacket::new(0.5, 1.0, 1.0, 0.0).unwrap().sample(&g).unwrap();
    assert!(k.apply(&wf).unwrap().sup_distance(&wf).unwrap() < 1e-13);
}

#[test]
fn positive_kernel_has_nonnegative_expectations() {
    // ρ = Σ λ_k v_k v_k† with λ_k ≥ 0 from a random Hermitian eigenbasis;
    // ⟨ψ, ρψ⟩ = Σ λ_k |⟨v_k, ψ⟩|².
    let n = 32;
    let g = Grid1D::new(-5.0, 5.0, n).unwrap();
    let eig = random_hermitian(n, 77).symmetric_eigen();
    let lambdas: Vec<f64> = (0..n).map(|i| (i % 5) as f64 * 0.1).collect();
    let d = CMatrix::from_diagonal(&DVector::from_iterator(n, lambdas.iter().map(|l| c(*l, 0.0))));
    let v = &eig.eigenvectors;
    let operator = v * d * v.adjoint();
    let kernel = DensityKernel::from_operator(g, &operator).unwrap();
    for seed in 0..5 {
        let amps = random_matrix(n, 900 + seed).column(0).iter().cloned().collect();
        let psi = WaveFunction::new(g, amps).unwrap();
        let value = psi.inner(&kernel.apply(&psi).unwrap()).unwrap();
        let phi = DVector::from_column_slice(psi.amplitudes()) * c(g.dx().sqrt(), 0.0);
        let oracle: f64 = (0..n).map(|k| lambdas[k] * v.column(k).dotc(&phi).norm_sqr()).sum();
        assert!(value.re >= 0.0);
        assert!((value.re - oracle).abs() < 1e-12 && value.im.abs() < 1e-12);
    }
}

fn coarse_packet() -> WaveFunction {
    GaussianPacket::reference().sample(&Grid1D::new(-20.0, 20.0, 256).unwrap()).unwrap()
}

#[test]
fn crosscheck_on_the_coarse_grid() {
    let det = DetectorSpec::point(0.0, 8.0).unwrap();
    let report = eeqt_crosscheck(&coarse_packet(), &det, 4e-4, 7500, Execution::default()).unwrap();
    let last = *report.traces.last().unwrap();
    assert!((last - 0.5).abs() < 0.06, "trace at t = 3: {last}");
    assert!(report.max_deviation < 1e-4, "deviation {}", report.max_deviation);
}

#[test]
fn crosscheck_without_detector_keeps_trace() {
    let det = DetectorSpec::point(0.0, 0.0).unwrap();
    let report = eeqt_crosscheck(&coarse_packet(), &det, 4e-4, 500, Execution::default()).unwrap();
    assert!(report.traces.iter().all(|t| (t - 1.0).abs() < 1e-9));
}

#[test]
fn crosscheck_ordering_follows_the_sweep() {
    let wf = coarse_packet();
    let det = DetectorSpec::point(0.0, 8.0).unwrap();
    let settings = EeqtSettings { dt: 4e-4, horizon: 2.0 };
    let sweep = kappa_sweep(&wf, &det, &[8.0, 16.0], &settings, Execution::default()).unwrap();
    let loss = |kappa: f64| {
        let model = GridLiouvillian::new(*wf.grid(), &det.with_kappa(kappa).unwrap(), Channel::Undetected, Execution::default())
            .unwrap();
        let rho0 = model.pure_state(&wf).unwrap();
        let last = integrate_with(&rho0, &model, 4e-4, 5000, |_, _, _| {}).unwrap();
        1.0 - last.trace().re
    };
    let (l8, l16) = (loss(8.0), loss(16.0));
    assert_eq!(l8 > l16, sweep.p_inf[0] > sweep.p_inf[1]);
    assert!((l8 - sweep.p_inf[0]).abs() < 1e-3 && (l16 - sweep.p_inf[1]).abs() < 1e-3);
}

#[test]
fn dense_and_grid_kernels_agree_on_a_small_grid() {
    let g = Grid1D::new(-6.0, 6.0, 16).unwrap();
    let det = DetectorSpec::point(0.0, 3.0).unwrap();
    let model = GridLiouvillian::new(g, &det, Channel::Complete, Execution::Sequential).unwrap();
    let rho = random_hermitian(16, 5);
    let out = toa_core::Liouvillian::rhs(&model, 0.0, &rho);
    // Same generator assembled densely in the position basis and rotated.
    let u = model.basis_change();
    let k2: Vec<Complex64> = g.momenta().map(|k| c(0.5 * k * k, 0.0)).collect();
    let h = u.adjoint() * CMatrix::from_diagonal(&DVector::from_vec(k2)) * &u;
    let mut f_diag = vec![c(0.0, 0.0); 16];
    for (j, w) in det.weights(&g) {
        f_diag[j] = c((det.kappa * w).sqrt(), 0.0);
    }
    let f = CMatrix::from_diagonal(&DVector::from_vec(f_diag));
    let dense = LindbladModel::new((&h + h.adjoint()) * c(0.5, 0.0), f).unwrap();
    let rho_x = u.adjoint() * &rho * &u;
    let expected = &u * toa_core::Liouvillian::rhs(&dense, 0.0, &rho_x) * u.adjoint();
    assert!(max_abs(&(out - expected)) < 1e-10);
}
