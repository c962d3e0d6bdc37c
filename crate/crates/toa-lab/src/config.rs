//! Declarative run configuration and its validation.
//!
//! Every section has defaults, so a config file only needs the keys it
//! changes. Unknown keys anywhere are rejected.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use toa_core::liouville::{Channel, GridLiouvillian, MAX_KERNEL_POINTS, STABILITY_LIMIT};
use toa_core::propagate::MAX_PHASE_STEP;
use toa_core::{DetectorSpec, Execution, GaussianPacket, Grid1D, Liouvillian, Regularization};

/// Shipped defaults for every experiment.
pub const PAPER_DEFAULTS: &str = include_str!("../configs/paper-defaults.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Free evolution of the packet in position space.
    Evolve,
    /// Free evolution in momentum space.
    Momentum,
    /// Kijowski right- and left-mover distributions.
    Kijowski,
    /// Damped-evolution arrival densities for a list of κ.
    Eeqt,
    /// Total detection probability across a κ grid.
    Sweep,
    /// Normalized EEQT against normalized Kijowski.
    Compare,
    /// Kernel Liouville trace against the damped norm.
    Lindblad,
    /// Connection and closedness residuals under refinement.
    Geometry,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Evolve,
        Experiment::Momentum,
        Experiment::Kijowski,
        Experiment::Eeqt,
        Experiment::Sweep,
        Experiment::Compare,
        Experiment::Lindblad,
        Experiment::Geometry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Momentum => "momentum",
            Experiment::Kijowski => "kijowski",
            Experiment::Eeqt => "eeqt",
            Experiment::Sweep => "sweep",
            Experiment::Compare => "compare",
            Experiment::Lindblad => "lindblad",
            Experiment::Geometry => "geometry",
        }
    }

    /// Time step used when the config leaves `dt` unset.
    pub fn default_dt(self) -> Option<f64> {
        match self {
            Experiment::Evolve | Experiment::Momentum => Some(1e-3),
            Experiment::Eeqt | Experiment::Sweep | Experiment::Compare => Some(1e-4),
            Experiment::Lindblad => Some(4e-4),
            Experiment::Kijowski | Experiment::Geometry => None,
        }
    }

    pub fn default_horizon(self) -> Option<f64> {
        match self {
            Experiment::Eeqt | Experiment::Sweep | Experiment::Compare | Experiment::Lindblad => Some(3.0),
            _ => None,
        }
    }

    pub fn figures(self) -> &'static [&'static str] {
        match self {
            Experiment::Evolve => &["fig1"],
            Experiment::Momentum => &["fig2"],
            Experiment::Kijowski => &["fig3", "fig4"],
            Experiment::Eeqt => &["fig5", "fig7"],
            Experiment::Sweep => &["fig6"],
            Experiment::Compare => &["fig8"],
            Experiment::Lindblad => &["liouville"],
            Experiment::Geometry => &["geometry"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    pub center: f64,
    /// Exponent α in `exp(−α(x − x₀)²)`.
    pub width: f64,
    pub momentum: f64,
    pub phase: f64,
}

impl Default for PacketConfig {
    fn default() -> Self {
        let p = GaussianPacket::reference();
        Self { center: p.center, width: p.width, momentum: p.momentum, phase: p.phase }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { x_min: -20.0, x_max: 20.0, points: 4096 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegularizationConfig {
    GridPoint,
    Gaussian { width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub position: f64,
    pub kappa: f64,
    pub regularization: RegularizationConfig,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self { position: 0.0, kappa: 8.0, regularization: RegularizationConfig::GridPoint }
    }
}

/// Geometric κ grid, or an explicit list when `values` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    pub values: Option<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { start: 0.5, end: 128.0, count: 9, values: None }
    }
}

impl SweepConfig {
    pub fn kappas(&self) -> Vec<f64> {
        match &self.values {
            Some(v) => v.clone(),
            None => toa_core::eeqt::geometric_kappas(self.start, self.end, self.count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { start: 0.0, end: 3.0, points: 600 }
    }
}

impl WindowConfig {
    pub fn times(&self) -> Vec<f64> {
        toa_core::arrival::linspace(self.start, self.end, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LindbladConfig {
    /// Grid points of the coarse kernel grid; the interval is `grid`'s.
    pub points: usize,
}

impl Default for LindbladConfig {
    fn default() -> Self {
        Self { points: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Points per axis of each unit-cube grid in the refinement study.
    pub sizes: Vec<usize>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { sizes: vec![13, 17, 21, 25] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub packet: PacketConfig,
    pub grid: GridConfig,
    pub detector: DetectorConfig,
    /// Sensitivities drawn by the `eeqt` experiment.
    pub kappas: Vec<f64>,
    pub sweep: SweepConfig,
    /// Arrival-time window.
    pub tau: WindowConfig,
    /// Output times of `evolve` and `momentum`.
    pub snapshots: Vec<f64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub lindblad: LindbladConfig,
    pub geometry: GeometryConfig,
    /// Destination directory; accepted on input but not recorded in bundles.
    #[serde(skip_serializing)]
    pub output: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            packet: PacketConfig::default(),
            grid: GridConfig::default(),
            detector: DetectorConfig::default(),
            kappas: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            sweep: SweepConfig::default(),
            tau: WindowConfig::default(),
            snapshots: vec![0.0, 0.5, 1.0, 2.0, 3.0],
            dt: None,
            horizon: None,
            lindblad: LindbladConfig::default(),
            geometry: GeometryConfig::default(),
            output: PathBuf::from("toa-output"),
            format: Format::Csv,
        }
    }
}

/// One violated precondition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Command-line values layered over a config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub kappas: Vec<f64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn paper_defaults() -> Self {
        serde_json::from_str(PAPER_DEFAULTS).expect("shipped defaults parse")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn packet(&self) -> Result<GaussianPacket, toa_core::Error> {
        let p = &self.packet;
        GaussianPacket::new(p.center, p.width, p.momentum, p.phase)
    }

    pub fn grid(&self) -> Result<Grid1D, toa_core::Error> {
        Grid1D::new(self.grid.x_min, self.grid.x_max, self.grid.points)
    }

    pub fn coarse_grid(&self) -> Result<Grid1D, toa_core::Error> {
        Grid1D::new(self.grid.x_min, self.grid.x_max, self.lindblad.points)
    }

    pub fn detector(&self) -> Result<DetectorSpec, toa_core::Error> {
        let regularization = match self.detector.regularization {
            RegularizationConfig::GridPoint => Regularization::GridPoint,
            RegularizationConfig::Gaussian { width } => Regularization::Gaussian { width },
        };
        DetectorSpec::new(self.detector.position, self.detector.kappa, regularization)
    }

    /// Layer command-line overrides for `experiment` on top of the config.
    pub fn apply(&mut self, experiment: Experiment, o: &Overrides) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if !o.kappas.is_empty() {
            match experiment {
                Experiment::Eeqt => self.kappas = o.kappas.clone(),
                Experiment::Sweep => self.sweep.values = Some(o.kappas.clone()),
                Experiment::Compare | Experiment::Lindblad => {
                    if o.kappas.len() > 1 {
                        out.push(Diagnostic::new("kappa", format!("{experiment} takes a single value")));
                    }
                    self.detector.kappa = o.kappas[0];
                }
                _ => out.push(Diagnostic::new("kappa", format!("not used by {experiment}"))),
            }
        }
        if o.dt.is_some() {
            self.dt = o.dt;
        }
        if o.horizon.is_some() {
            self.horizon = o.horizon;
        }
        if let Some(p) = &o.output {
            self.output = p.clone();
        }
        if let Some(f) = o.format {
            self.format = f;
        }
        out
    }

    /// The fully specified config for `experiment`: defaults filled in and
    /// settings the experiment ignores cleared.
    pub fn resolved(&self, experiment: Experiment) -> Self {
        let mut c = self.clone();
        c.experiment = Some(experiment);
        c.dt = experiment.default_dt().and(self.dt.or(experiment.default_dt()));
        c.horizon = experiment.default_horizon().and(self.horizon.or(experiment.default_horizon()));
        c
    }

    /// Every violated precondition of the resolved config for `experiment`.
    pub fn validate(&self, experiment: Experiment) -> Vec<Diagnostic> {
        let c = self.resolved(experiment);
        let mut d = Vec::new();
        if let Some(e) = self.experiment {
            if e != experiment {
                d.push(Diagnostic::new("experiment", format!("config names {e} but {experiment} was requested")));
            }
        }
        c.check_grid(&mut d);
        c.check_packet(&mut d);
        if experiment != Experiment::Geometry {
            c.check_detector(&mut d);
        }
        if let Some(dt) = c.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                d.push(Diagnostic::new("dt", "dt must be positive"));
            }
        }
        if let Some(h) = c.horizon {
            if !(h > 0.0 && h.is_finite()) {
                d.push(Diagnostic::new("horizon", "horizon must be positive"));
            } else if let Some(dt) = c.dt.filter(|dt| *dt > 0.0) {
                if (h / dt).round() < 1.0 {
                    d.push(Diagnostic::new("horizon", "horizon is shorter than one step"));
                }
            }
        }
        match experiment {
            Experiment::Evolve | Experiment::Momentum => c.check_snapshots(&mut d),
            Experiment::Kijowski => c.check_window(&mut d),
            Experiment::Eeqt => {
                c.check_window(&mut d);
                check_kappas("kappas", &c.kappas, &mut d);
            }
            Experiment::Sweep => c.check_sweep(&mut d),
            Experiment::Compare => {
                c.check_window(&mut d);
                if !(c.detector.kappa > 0.0) {
                    d.push(Diagnostic::new("detector.kappa", "comparison needs a positive kappa"));
                }
            }
            Experiment::Lindblad => c.check_lindblad(&mut d),
            Experiment::Geometry => c.check_geometry(&mut d),
        }
        if d.is_empty() && experiment != Experiment::Geometry && experiment != Experiment::Lindblad {
            c.check_step_size(&mut d);
        }
        d
    }

    fn check_grid(&self, d: &mut Vec<Diagnostic>) {
        let g = &self.grid;
        if g.points < 2 || !g.points.is_power_of_two() {
            d.push(Diagnostic::new("grid.points", format!("must be a power of two >= 2, got {}", g.points)));
        }
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_min < g.x_max) {
            d.push(Diagnostic::new("grid", format!("need finite x_min < x_max, got [{}, {}]", g.x_min, g.x_max)));
        }
    }

    fn check_packet(&self, d: &mut Vec<Diagnostic>) {
        let p = &self.packet;
        if !(p.width > 0.0 && p.width.is_finite()) {
            d.push(Diagnostic::new("packet.width", format!("must be positive, got {}", p.width)));
            return;
        }
        if ![p.center, p.momentum, p.phase].iter().all(|v| v.is_finite()) {
            d.push(Diagnostic::new("packet", "center, momentum and phase must be finite"));
            return;
        }
        if let (Ok(packet), Ok(grid)) = (self.packet(), self.grid()) {
            if let Err(e) = packet.sample(&grid) {
                d.push(Diagnostic::new("packet", e.to_string()));
            }
        }
    }

    fn check_detector(&self, d: &mut Vec<Diagnostic>) {
        if let Err(e) = self.detector() {
            d.push(Diagnostic::new("detector", e.to_string()));
            return;
        }
        let pos = self.detector.position;
        if !(self.grid.x_min < pos && pos < self.grid.x_max) {
            d.push(Diagnostic::new("detector.position", format!("{pos} lies outside the grid")));
        }
    }

    fn check_window(&self, d: &mut Vec<Diagnostic>) {
        let w = &self.tau;
        if !(w.start.is_finite() && w.end.is_finite() && w.start < w.end) {
            d.push(Diagnostic::new("tau", format!("need start < end, got [{}, {}]", w.start, w.end)));
        }
        if w.points < 2 {
            d.push(Diagnostic::new("tau.points", "need at least two points"));
        }
    }

    fn check_snapshots(&self, d: &mut Vec<Diagnostic>) {
        if self.snapshots.is_empty() {
            d.push(Diagnostic::new("snapshots", "need at least one time"));
        }
        if self.snapshots.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            d.push(Diagnostic::new("snapshots", "times must be finite and non-negative"));
        }
        if self.snapshots.windows(2).any(|w| w[1] <= w[0]) {
            d.push(Diagnostic::new("snapshots", "times must be strictly increasing"));
        }
        if let Some(dt) = self.dt.filter(|dt| *dt > 0.0) {
            if self.snapshots.iter().any(|t| ((t / dt).round() * dt - t).abs() > 1e-9 * t.max(1.0)) {
                d.push(Diagnostic::new("snapshots", format!("times must be multiples of dt = {dt}")));
            }
        }
    }

    fn check_sweep(&self, d: &mut Vec<Diagnostic>) {
        let s = &self.sweep;
        match &s.values {
            Some(v) => check_kappas("sweep.values", v, d),
            None => {
                if !(s.start > 0.0 && s.end > s.start && s.end.is_finite()) {
                    d.push(Diagnostic::new("sweep", format!("need 0 < start < end, got [{}, {}]", s.start, s.end)));
                }
                if s.count < 3 {
                    d.push(Diagnostic::new("sweep.count", "need at least three values"));
                }
            }
        }
    }

    fn check_lindblad(&self, d: &mut Vec<Diagnostic>) {
        let n = self.lindblad.points;
        if n < 2 || !n.is_power_of_two() {
            d.push(Diagnostic::new("lindblad.points", format!("must be a power of two >= 2, got {n}")));
            return;
        }
        if n > MAX_KERNEL_POINTS {
            d.push(Diagnostic::new("lindblad.points", format!("kernel limit is {MAX_KERNEL_POINTS}, got {n}")));
            return;
        }
        let (Ok(grid), Ok(det), Ok(packet)) = (self.coarse_grid(), self.detector(), self.packet()) else {
            return;
        };
        if let Err(e) = packet.sample(&grid) {
            d.push(Diagnostic::new("lindblad.points", format!("coarse grid: {e}")));
        }
        if let (Ok(model), Some(dt)) =
            (GridLiouvillian::new(grid, &det, Channel::Undetected, Execution::Sequential), self.dt)
        {
            let load = dt * model.rate_bound();
            if load > STABILITY_LIMIT {
                d.push(Diagnostic::new(
                    "dt",
                    format!("dt·rate = {load:.3} exceeds {STABILITY_LIMIT} on the coarse grid"),
                ));
            }
        }
    }

    fn check_geometry(&self, d: &mut Vec<Diagnostic>) {
        let s = &self.geometry.sizes;
        if s.len() < 2 {
            d.push(Diagnostic::new("geometry.sizes", "need at least two grids for a slope"));
        }
        if s.iter().any(|n| *n < 7) {
            d.push(Diagnostic::new("geometry.sizes", "every grid needs at least 7 points per axis"));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) {
            d.push(Diagnostic::new("geometry.sizes", "sizes must be strictly increasing"));
        }
    }

    fn check_step_size(&self, d: &mut Vec<Diagnostic>) {
        let (Some(dt), Ok(packet), Ok(grid)) = (self.dt, self.packet(), self.grid()) else {
            return;
        };
        let Ok(wf) = packet.sample(&grid) else { return };
        let k = wf.to_momentum().bandwidth();
        let phase = 0.5 * k * k * dt;
        if phase >= MAX_PHASE_STEP {
            d.push(Diagnostic::new("dt", format!("kinetic phase {phase:.3} per step exceeds {MAX_PHASE_STEP:.3}")));
        }
    }
}

fn check_kappas(field: &str, kappas: &[f64], d: &mut Vec<Diagnostic>) {
    if kappas.is_empty() {
        d.push(Diagnostic::new(field, "need at least one kappa"));
    }
    if kappas.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        d.push(Diagnostic::new(field, "every kappa must be positive"));
    }
}
