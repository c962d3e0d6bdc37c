//! Detection statistics of the damped evolution: arrival density, total
//! detection probability as a function of κ, and comparison against the
//! Kijowski distribution.

use num_complex::Complex64;

use crate::arrival::{cumulative_trapezoid, trapezoid, ArrivalDistribution};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::kijowski::kijowski_distribution_at;
use crate::propagate::{damped_evolve, DetectorSpec, EvolutionRecord};
use crate::wavefunction::WaveFunction;

/// Time step and horizon for damped runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeqtSettings {
    pub dt: f64,
    pub horizon: f64,
}

impl Default for EeqtSettings {
    fn default() -> Self {
        Self { dt: 1e-4, horizon: 3.0 }
    }
}

impl EeqtSettings {
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::NonPositiveStep(self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) || self.steps() < 1 {
            return Err(Error::BadTimeGrid);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Density `κ·|ψ_t(a)|²` on the record's time grid.
    pub distribution: ArrivalDistribution,
    /// `1 − ‖ψ_t‖²`, the independent route to the cumulative detection.
    pub norm_loss: Vec<f64>,
    /// `sup_t |∫₀ᵗ p − (1 − ‖ψ_t‖²)|`.
    pub consistency: f64,
    /// Probability still heading towards the detector at the horizon: the
    /// right-moving part left of it plus the left-moving part right of it.
    pub tail_bound: f64,
}

impl Detection {
    /// Detection probability up to the horizon, from the norm loss.
    pub fn probability(&self) -> f64 {
        *self.norm_loss.last().unwrap()
    }
}

pub fn detection_distribution(record: &EvolutionRecord, detector: &DetectorSpec) -> Result<Detection> {
    if record.detector != *detector {
        return Err(Error::DetectorMismatch);
    }
    let density: Vec<f64> = record.site_densities.iter().map(|s| detector.kappa * s).collect();
    let cumulative = cumulative_trapezoid(&record.times, &density);
    let norm_loss = record.norm_loss();
    let consistency = cumulative
        .iter()
        .zip(&norm_loss)
        .map(|(c, l)| (c - l).abs())
        .fold(0.0, f64::max);
    let distribution = ArrivalDistribution::from_density(record.times.clone(), density)?;
    Ok(Detection {
        distribution,
        norm_loss,
        consistency,
        tail_bound: incoming_probability(&record.final_state, detector.position),
    })
}

fn incoming_probability(wf: &WaveFunction, position: f64) -> f64 {
    let grid = *wf.grid();
    let split = |left: bool| {
        let amps = grid
            .positions()
            .zip(wf.amplitudes())
            .map(|(x, a)| if (x < position) == left { *a } else { Complex64::new(0.0, 0.0) })
            .collect();
        WaveFunction::new(grid, amps).expect("same grid").to_momentum()
    };
    let dk = grid.dk();
    let directed = |left: bool| {
        let spec = split(left);
        // The k = 0 bin is split evenly between the two directions.
        spec.momenta()
            .zip(spec.amplitudes())
            .map(|(k, a)| {
                let toward = if left { k > 0.0 } else { k < 0.0 };
                let w = if k == 0.0 { 0.5 } else if toward { 1.0 } else { 0.0 };
                w * a.norm_sqr()
            })
            .sum::<f64>()
            * dk
    };
    directed(true) + directed(false)
}

/// Run the damped evolution to the horizon and extract the detection data.
pub fn detect(wf: &WaveFunction, detector: &DetectorSpec, settings: &EeqtSettings) -> Result<Detection> {
    settings.validate()?;
    let record = damped_evolve(wf, detector, settings.dt, settings.steps())?;
    detection_distribution(&record, detector)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaSweepResult {
    pub kappas: Vec<f64>,
    /// `P(∞)` estimated as the norm loss at the horizon.
    pub p_inf: Vec<f64>,
    pub tail_bounds: Vec<f64>,
    pub argmax_kappa: f64,
    pub p_at_argmax: f64,
}

impl KappaSweepResult {
    pub fn argmax_index(&self) -> usize {
        self.kappas.iter().position(|k| *k == self.argmax_kappa).unwrap()
    }

    /// Strictly rising up to the maximum, strictly falling after it, with the
    /// maximum away from both ends.
    pub fn is_unimodal(&self) -> bool {
        let i = self.argmax_index();
        let p = &self.p_inf;
        i > 0
            && i + 1 < p.len()
            && p[..=i].windows(2).all(|w| w[1] > w[0])
            && p[i..].windows(2).all(|w| w[1] < w[0])
    }
}

/// `P(∞)` for every κ in `kappas`, each from an independent damped run.
pub fn kappa_sweep(
    wf: &WaveFunction,
    template: &DetectorSpec,
    kappas: &[f64],
    settings: &EeqtSettings,
    exec: Execution,
) -> Result<KappaSweepResult> {
    if kappas.is_empty() {
        return Err(Error::EmptyKappaList);
    }
    settings.validate()?;
    let detectors = kappas
        .iter()
        .map(|k| template.with_kappa(*k))
        .collect::<Result<Vec<_>>>()?;
    let runs = exec.map(detectors.len(), |i| detect(wf, &detectors[i], settings));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let p_inf: Vec<f64> = runs.iter().map(|d| d.probability().clamp(0.0, 1.0)).collect();
    let tail_bounds = runs.iter().map(|d| d.tail_bound).collect();
    let mut best = 0;
    for (i, p) in p_inf.iter().enumerate() {
        if *p > p_inf[best] {
            best = i;
        }
    }
    Ok(KappaSweepResult {
        kappas: kappas.to_vec(),
        argmax_kappa: kappas[best],
        p_at_argmax: p_inf[best],
        p_inf,
        tail_bounds,
    })
}

/// `count` values from `start` to `end` spaced evenly in `log κ`.
pub fn geometric_kappas(start: f64, end: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let r = (end / start).ln() / (count - 1) as f64;
    (0..count).map(|i| start * (r * i as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub times: Vec<f64>,
    pub eeqt: Vec<f64>,
    pub kijowski: Vec<f64>,
    /// `eeqt − kijowski`, pointwise.
    pub difference: Vec<f64>,
    pub sup_difference: f64,
    pub l1_difference: f64,
    /// Detection probability up to the horizon before normalization.
    pub detection_probability: f64,
    /// Kijowski probability inside the time window before normalization.
    pub kijowski_window_probability: f64,
}

impl ComparisonReport {
    pub fn eeqt_integral(&self) -> f64 {
        trapezoid(&self.times, &self.eeqt)
    }

    pub fn kijowski_integral(&self) -> f64 {
        trapezoid(&self.times, &self.kijowski)
    }
}

/// Normalized EEQT and Kijowski densities on a common time grid.
///
/// The report carries both curves and their difference; it makes no claim
/// about whether they coincide.
pub fn compare_with_kijowski(
    wf: &WaveFunction,
    detector: &DetectorSpec,
    settings: &EeqtSettings,
    times: &[f64],
    exec: Execution,
) -> Result<ComparisonReport> {
    if !(detector.kappa > 0.0) {
        return Err(Error::InvalidDetector("comparison needs a positive sensitivity".into()));
    }
    let detection = detect(wf, detector, settings)?;
    let eeqt_raw = detection.distribution.resampled(times)?;
    let eeqt = eeqt_raw.normalized()?;
    let kij_raw = kijowski_distribution_at(wf, detector.position, times, exec)?.distribution;
    let kij = kij_raw.normalized()?;

    let difference: Vec<f64> =
        eeqt.density().iter().zip(kij.density()).map(|(a, b)| a - b).collect();
    let sup_difference = difference.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let abs: Vec<f64> = difference.iter().map(|d| d.abs()).collect();
    Ok(ComparisonReport {
        times: times.to_vec(),
        eeqt: eeqt.density().to_vec(),
        kijowski: kij.density().to_vec(),
        l1_difference: trapezoid(times, &abs),
        sup_difference,
        difference,
        detection_probability: detection.probability(),
        kijowski_window_probability: kij_raw.total(),
    })
}
