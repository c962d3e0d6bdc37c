//! Experiments: each turns a resolved config into one or more bundles.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use toa_core::arrival::trapezoid;
use toa_core::eeqt::{detect, Detection};
use toa_core::geometry::{convergence_slope, refinement_study};
use toa_core::kijowski::kijowski_distribution_at;
use toa_core::{
    compare_with_kijowski, eeqt_crosscheck, kappa_sweep, DetectorSpec, EeqtSettings, Execution, SplitStep,
    WaveFunction,
};

use crate::bundle::{Column, FigureBundle};
use crate::config::{Diagnostic, Experiment, Format, RunConfig};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration")]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Compute(#[from] toa_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn atomic(name: impl Into<String>, description: impl Into<String>) -> Column {
    Column::new(name, "atomic", description)
}

/// Validate and run `experiment`, returning its bundles in figure order.
pub fn run(config: &RunConfig, experiment: Experiment, exec: Execution) -> Result<Vec<FigureBundle>, RunError> {
    let diagnostics = config.validate(experiment);
    if !diagnostics.is_empty() {
        return Err(RunError::Invalid(diagnostics));
    }
    let c = config.resolved(experiment);
    log::info!("running {experiment}");
    let mut bundles = match experiment {
        Experiment::Evolve => vec![evolve(&c, false)?],
        Experiment::Momentum => vec![evolve(&c, true)?],
        Experiment::Kijowski => kijowski(&c, exec)?,
        Experiment::Eeqt => eeqt(&c, exec)?,
        Experiment::Sweep => vec![sweep(&c, exec)?],
        Experiment::Compare => vec![compare(&c, exec)?],
        Experiment::Lindblad => vec![lindblad(&c, exec)?],
        Experiment::Geometry => vec![geometry(&c, exec)?],
    };
    for b in &mut bundles {
        common_metadata(b, &c);
    }
    Ok(bundles)
}

fn common_metadata(b: &mut FigureBundle, c: &RunConfig) {
    let e = c.experiment.expect("resolved");
    b.meta("experiment", e).meta("code_version", CODE_VERSION).meta("config", c.to_json());
    if e != Experiment::Geometry {
        let g = &c.grid;
        b.meta("grid", format!("[{}, {}) n={}", g.x_min, g.x_max, g.points));
    }
    if let Some(dt) = c.dt {
        b.meta("dt", dt);
    }
    if let Some(h) = c.horizon {
        b.meta("horizon", h);
    }
    if matches!(e, Experiment::Compare | Experiment::Lindblad) {
        b.meta("kappa", c.detector.kappa);
    }
    if matches!(e, Experiment::Kijowski | Experiment::Eeqt | Experiment::Compare) {
        b.meta("tau_range", format!("[{}, {}] points={}", c.tau.start, c.tau.end, c.tau.points));
        b.meta("tau_range_note", "configured window; the full line is not covered");
    }
}

/// Write each bundle to `<dir>/<id>.<ext>`.
pub fn write_bundles(bundles: &[FigureBundle], dir: &Path, format: Format) -> Result<Vec<PathBuf>, RunError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut paths = Vec::new();
    for b in bundles {
        let path = dir.join(format!("{}.{}", b.id, format.extension()));
        let text = match format {
            Format::Csv => b.to_csv(),
            Format::Json => b.to_json(),
        };
        fs::write(&path, text).map_err(io(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

fn initial_state(c: &RunConfig) -> Result<WaveFunction, RunError> {
    Ok(c.packet()?.sample(&c.grid()?)?)
}

fn settings(c: &RunConfig) -> EeqtSettings {
    EeqtSettings { dt: c.dt.expect("resolved"), horizon: c.horizon.expect("resolved") }
}

/// Split-step snapshots against the closed form, in position or momentum space.
fn evolve(c: &RunConfig, momentum: bool) -> Result<FigureBundle, RunError> {
    let packet = c.packet()?;
    let grid = c.grid()?;
    let dt = c.dt.expect("resolved");
    let stepper = SplitStep::new(grid, None, dt)?;
    let mut wf = initial_state(c)?;
    let mut t = 0.0;
    let mut columns = Vec::new();
    let mut notes = Vec::new();
    let axis = if momentum {
        atomic("k", "momentum")
    } else {
        atomic("x", "position")
    };
    let initial_spectrum = wf.to_momentum().density();
    columns.push((axis, if momentum { wf.to_momentum().momenta().collect() } else { grid.positions().collect() }));
    for &s in &c.snapshots {
        let steps = ((s - t) / dt).round() as usize;
        wf = stepper.evolve(&wf, steps)?;
        t = s;
        let exact = packet.sample_evolved(s, &grid);
        if momentum {
            let density = wf.to_momentum().density();
            let shape = density.iter().zip(&initial_spectrum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            notes.push((format!("shape_deviation_t{s}"), shape));
            columns.push((atomic(format!("abs2_t{s}"), format!("|psi~(t={s},k)|^2, split-step")), density));
        } else {
            notes.push((format!("l2_error_t{s}"), wf.l2_distance(&exact)?));
            columns.push((atomic(format!("abs2_t{s}"), format!("|psi(t={s},x)|^2, split-step")), wf.density()));
            columns.push((atomic(format!("exact_t{s}"), format!("|psi(t={s},x)|^2, closed form")), exact.density()));
        }
    }
    let mut b = FigureBundle::from_columns(if momentum { "fig2" } else { "fig1" }, columns);
    for (k, v) in notes {
        b.meta(&k, v);
    }
    Ok(b)
}

fn kijowski(c: &RunConfig, exec: Execution) -> Result<Vec<FigureBundle>, RunError> {
    let wf = initial_state(c)?;
    let times = c.tau.times();
    let res = kijowski_distribution_at(&wf, c.detector.position, &times, exec)?;
    let plus = res.amplitudes.plus_density();
    let minus = res.amplitudes.minus_density();
    let tau = || atomic("tau", "arrival time");

    let mut right = FigureBundle::from_columns(
        "fig3",
        vec![
            (tau(), times.clone()),
            (atomic("right", "|psi+(tau)|^2, right movers"), plus),
            (atomic("total", "p(tau) = |psi+|^2 + |psi-|^2"), res.distribution.density().to_vec()),
        ],
    );
    right
        .meta("argmax_tau", res.distribution.argmax())
        .meta("window_probability", res.distribution.total())
        .meta("padding", res.padding);
    let mut left = FigureBundle::from_columns(
        "fig4",
        vec![(tau(), times), (atomic("left", "|psi-(tau)|^2, left movers"), minus)],
    );
    left.meta("left_mover_ratio", res.amplitudes.left_mover_ratio()).meta("padding", res.padding);
    Ok(vec![right, left])
}

fn eeqt(c: &RunConfig, exec: Execution) -> Result<Vec<FigureBundle>, RunError> {
    let wf = initial_state(c)?;
    let template = c.detector()?;
    let s = settings(c);
    let detectors = c.kappas.iter().map(|k| template.with_kappa(*k)).collect::<Result<Vec<_>, _>>()?;
    let runs: Vec<Detection> =
        exec.map(detectors.len(), |i| detect(&wf, &detectors[i], &s)).into_iter().collect::<Result<_, _>>()?;
    let times = c.tau.times();
    let tau = || atomic("tau", "arrival time");
    let mut raw = vec![(tau(), times.clone())];
    let mut normalized = vec![(tau(), times.clone())];
    for (k, d) in c.kappas.iter().zip(&runs) {
        let on_window = d.distribution.resampled(&times)?;
        raw.push((atomic(format!("p_kappa{k}"), format!("kappa |psi_t(a)|^2 at kappa = {k}")), on_window.density().to_vec()));
        normalized.push((
            atomic(format!("p_kappa{k}"), format!("normalized on the window, kappa = {k}")),
            on_window.normalized()?.density().to_vec(),
        ));
    }
    let mut fig5 = FigureBundle::from_columns("fig5", raw);
    let mut fig7 = FigureBundle::from_columns("fig7", normalized);
    for (k, d) in c.kappas.iter().zip(&runs) {
        for b in [&mut fig5, &mut fig7] {
            b.meta(&format!("p_inf_kappa{k}"), d.probability())
                .meta(&format!("consistency_kappa{k}"), d.consistency)
                .meta(&format!("tail_bound_kappa{k}"), d.tail_bound);
        }
    }
    Ok(vec![fig5, fig7])
}

fn sweep(c: &RunConfig, exec: Execution) -> Result<FigureBundle, RunError> {
    let wf = initial_state(c)?;
    let kappas = c.sweep.kappas();
    let r = kappa_sweep(&wf, &c.detector()?, &kappas, &settings(c), exec)?;
    let mut b = FigureBundle::from_columns(
        "fig6",
        vec![
            (atomic("kappa", "detector sensitivity"), r.kappas.clone()),
            (Column::new("p_inf", "1", "total detection probability up to the horizon"), r.p_inf.clone()),
            (Column::new("tail_bound", "1", "probability still heading to the detector"), r.tail_bounds.clone()),
        ],
    );
    let v = c.packet()?.velocity();
    let nearest = kappas
        .iter()
        .copied()
        .min_by(|a, b| (a.ln() - (2.0 * v).ln()).abs().total_cmp(&(b.ln() - (2.0 * v).ln()).abs()))
        .unwrap_or(f64::NAN);
    b.meta("argmax_kappa", r.argmax_kappa)
        .meta("p_at_argmax", r.p_at_argmax)
        .meta("unimodal", r.is_unimodal())
        .meta("velocity", v)
        .meta("kappa_nearest_twice_velocity", nearest);
    Ok(b)
}

fn compare(c: &RunConfig, exec: Execution) -> Result<FigureBundle, RunError> {
    let wf = initial_state(c)?;
    let times = c.tau.times();
    let r = compare_with_kijowski(&wf, &c.detector()?, &settings(c), &times, exec)?;
    let mut b = FigureBundle::from_columns(
        "fig8",
        vec![
            (atomic("tau", "arrival time"), times),
            (atomic("eeqt", "normalized detection density"), r.eeqt.clone()),
            (atomic("kijowski", "normalized Kijowski density"), r.kijowski.clone()),
            (atomic("difference", "eeqt - kijowski"), r.difference.clone()),
        ],
    );
    b.meta("sup_difference", r.sup_difference)
        .meta("l1_difference", r.l1_difference)
        .meta("eeqt_integral", r.eeqt_integral())
        .meta("kijowski_integral", r.kijowski_integral())
        .meta("detection_probability", r.detection_probability)
        .meta("kijowski_window_probability", r.kijowski_window_probability)
        .meta("equality_asserted", false);
    Ok(b)
}

fn lindblad(c: &RunConfig, exec: Execution) -> Result<FigureBundle, RunError> {
    let grid = c.coarse_grid()?;
    let wf = c.packet()?.sample(&grid)?;
    let det: DetectorSpec = c.detector()?;
    let s = settings(c);
    let r = eeqt_crosscheck(&wf, &det, s.dt, s.steps(), exec)?;
    let difference: Vec<f64> = r.traces.iter().zip(&r.norms_sqr).map(|(a, b)| a - b).collect();
    let (trace_loss, norm_loss) = (1.0 - r.traces.last().unwrap(), 1.0 - r.norms_sqr.last().unwrap());
    let mut b = FigureBundle::from_columns(
        "liouville",
        vec![
            (atomic("t", "time"), r.times.clone()),
            (Column::new("trace", "1", "Tr rho_t, kernel Liouville equation"), r.traces.clone()),
            (Column::new("norm_sqr", "1", "|psi_t|^2, damped evolution"), r.norms_sqr.clone()),
            (Column::new("difference", "1", "trace - norm_sqr"), difference),
        ],
    );
    b.meta("kernel_points", grid.len())
        .meta("trace_loss", trace_loss)
        .meta("norm_loss", norm_loss)
        .meta("max_deviation", r.max_deviation);
    Ok(b)
}

fn geometry(c: &RunConfig, exec: Execution) -> Result<FigureBundle, RunError> {
    let rows = refinement_study(&c.geometry.sizes, exec)?;
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let compat: Vec<f64> = rows.iter().map(|r| r.compatibility).collect();
    let closed: Vec<f64> = rows.iter().map(|r| r.closedness).collect();
    let mut b = FigureBundle::from_columns(
        "geometry",
        vec![
            (Column::new("points", "1", "samples per axis"), rows.iter().map(|r| r.points as f64).collect()),
            (Column::new("h", "1", "grid spacing"), hs.clone()),
            (Column::new("compatibility", "1", "interior max of the metric compatibility residual"), compat.clone()),
            (Column::new("closedness", "1", "interior max of the cyclic sum of dPhi"), closed.clone()),
        ],
    );
    b.meta("compatibility_slope", convergence_slope(&hs, &compat))
        .meta("closedness_slope", convergence_slope(&hs, &closed));
    Ok(b)
}

/// Trapezoid integral of a named column against the first column.
pub fn column_integral(b: &FigureBundle, name: &str) -> Option<f64> {
    let x = b.rows.iter().map(|r| r[0]).collect::<Vec<_>>();
    Some(trapezoid(&x, &b.column(name)?))
}
