//! Kijowski arrival-time distribution at `x = 0` for a free particle.
//!
//! The amplitudes are
//!
//! ```text
//! ψ⁺(τ) = (2π)^{-1/2} ∫_0^∞  √k  ψ̃(k) e^{−ik²τ/2} dk
//! ψ⁻(τ) = (2π)^{-1/2} ∫_−∞^0 √−k ψ̃(k) e^{−ik²τ/2} dk
//! ```
//!
//! and the density is `p(τ) = |ψ⁺(τ)|² + |ψ⁻(τ)|²`. Both integrals use the
//! trapezoidal rule on the momentum grid; the `k = 0` endpoint contributes
//! nothing because the integrand vanishes there.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arrival::ArrivalDistribution;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::wavefunction::{SpectralWaveFunction, WaveFunction};

/// Momentum nodes whose spectral density is below this fraction of the peak
/// are dropped from the quadrature.
const NODE_CUTOFF: f64 = 1e-32;

#[derive(Debug, Clone, PartialEq)]
pub struct KijowskiAmplitudes {
    pub times: Vec<f64>,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
}

impl KijowskiAmplitudes {
    pub fn plus_density(&self) -> Vec<f64> {
        self.plus.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn minus_density(&self) -> Vec<f64> {
        self.minus.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sup |ψ⁻|² / sup |ψ⁺|²`.
    pub fn left_mover_ratio(&self) -> f64 {
        let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
        max(self.minus_density()) / max(self.plus_density())
    }
}

struct Node {
    k: f64,
    weight: Complex64,
}

fn half_line_nodes(spectral: &SpectralWaveFunction, positive: bool) -> Vec<Node> {
    let grid = spectral.grid();
    let n = grid.len();
    let dk = spectral.dk();
    let amps = spectral.amplitudes();
    let peak = amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let range = if positive { n / 2 + 1..n } else { 0..n / 2 };
    let (first, last) = (range.start, range.end - 1);
    range
        .filter(|&m| amps[m].norm_sqr() > NODE_CUTOFF * peak)
        .map(|m| {
            let k = grid.k(m);
            // The half-line end away from k = 0 carries trapezoid weight ½.
            let end = if positive { m == last } else { m == first };
            let w = if end { 0.5 } else { 1.0 };
            Node { k, weight: amps[m] * (w * k.abs().sqrt() * dk / (2.0 * PI).sqrt()) }
        })
        .collect()
}

fn amplitude(nodes: &[Node], tau: f64) -> Complex64 {
    nodes
        .iter()
        .map(|n| n.weight * Complex64::from_polar(1.0, -0.5 * n.k * n.k * tau))
        .sum()
}

/// Evaluate `ψ⁺` and `ψ⁻` at every time in `times`.
pub fn kijowski_amplitudes(
    spectral: &SpectralWaveFunction,
    times: &[f64],
    exec: Execution,
) -> KijowskiAmplitudes {
    let plus_nodes = half_line_nodes(spectral, true);
    let minus_nodes = half_line_nodes(spectral, false);
    let pairs = exec.map(times.len(), |i| {
        (amplitude(&plus_nodes, times[i]), amplitude(&minus_nodes, times[i]))
    });
    let (plus, minus) = pairs.into_iter().unzip();
    KijowskiAmplitudes { times: times.to_vec(), plus, minus }
}

/// `p(τ) = |ψ⁺(τ)|² + |ψ⁻(τ)|²` with its cumulative distribution.
pub fn kijowski_density(amplitudes: &KijowskiAmplitudes) -> Result<ArrivalDistribution> {
    if amplitudes.plus.len() != amplitudes.times.len()
        || amplitudes.minus.len() != amplitudes.times.len()
    {
        return Err(Error::LengthMismatch {
            expected: amplitudes.times.len(),
            got: amplitudes.plus.len().min(amplitudes.minus.len()),
        });
    }
    let density = amplitudes
        .plus
        .iter()
        .zip(&amplitudes.minus)
        .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
        .collect();
    ArrivalDistribution::from_density(amplitudes.times.clone(), density)
}

/// Smallest power-of-two padding factor for which the phase `k·dk·|τ|`
/// advances by less than π between momentum nodes, over the state's
/// bandwidth and the largest requested `|τ|`.
pub fn required_padding(wf: &WaveFunction, times: &[f64]) -> usize {
    let bandwidth = wf.to_momentum().bandwidth();
    let tau = times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let mut factor = 1usize;
    let dk = wf.grid().dk();
    while bandwidth * dk / factor as f64 * tau >= PI && factor < 1 << 16 {
        factor *= 2;
    }
    factor
}

#[derive(Debug, Clone, PartialEq)]
pub struct KijowskiResult {
    pub amplitudes: KijowskiAmplitudes,
    pub distribution: ArrivalDistribution,
    /// Zero-padding factor applied to the position grid before transforming.
    pub padding: usize,
}

/// Full pipeline from a position-space state: pad the grid so the momentum
/// quadrature resolves the oscillatory factor, transform, and integrate.
pub fn kijowski_distribution(
    wf: &WaveFunction,
    times: &[f64],
    exec: Execution,
) -> Result<KijowskiResult> {
    kijowski_distribution_at(wf, 0.0, times, exec)
}

/// Arrival at `x = position`: the state is translated by `−position` (a phase
/// `e^{ik·position}` on `ψ̃`) before the amplitudes are evaluated.
pub fn kijowski_distribution_at(
    wf: &WaveFunction,
    position: f64,
    times: &[f64],
    exec: Execution,
) -> Result<KijowskiResult> {
    let padding = required_padding(wf, times);
    let mut spectral = if padding > 1 { wf.padded(padding)?.to_momentum() } else { wf.to_momentum() };
    if position != 0.0 {
        spectral = spectral.translated(-position);
    }
    let amplitudes = kijowski_amplitudes(&spectral, times, exec);
    let distribution = kijowski_density(&amplitudes)?;
    Ok(KijowskiResult { amplitudes, distribution, padding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::{linspace, trapezoid};
    use crate::grid::Grid1D;
    use crate::packet::GaussianPacket;

    fn reference() -> WaveFunction {
        GaussianPacket::reference().sample(&Grid1D::standard()).unwrap()
    }

    #[test]
    fn zero_state_gives_zero_density() {
        let wf = WaveFunction::zeros(Grid1D::new(-10.0, 10.0, 256).unwrap());
        let amps = kijowski_amplitudes(&wf.to_momentum(), &linspace(0.0, 1.0, 11), Execution::Sequential);
        let dist = kijowski_density(&amps).unwrap();
        assert!(dist.density().iter().all(|p| *p == 0.0));
        assert!(dist.normalized().is_err());
    }

    #[test]
    fn right_moving_spectrum_has_no_left_amplitude() {
        let g = Grid1D::standard();
        let spec = reference().to_momentum();
        let amps: Vec<Complex64> = spec
            .momenta()
            .zip(spec.amplitudes())
            .map(|(k, a)| if k > 0.0 { *a } else { Complex64::new(0.0, 0.0) })
            .collect();
        let only_positive = SpectralWaveFunction::new(g, amps).unwrap();
        let res = kijowski_amplitudes(&only_positive, &linspace(0.0, 3.0, 31), Execution::Sequential);
        assert!(res.minus.iter().all(|m| m.norm() == 0.0));
    }

    #[test]
    fn reference_left_movers_are_negligible() {
        let res = kijowski_distribution(&reference(), &linspace(0.0, 3.0, 600), Execution::default()).unwrap();
        assert!(res.amplitudes.left_mover_ratio() < 1e-4);
    }

    #[test]
    fn reference_peak_location() {
        // Independent adaptive quadrature on the analytic transform puts the
        // maximum of p(τ) at τ* = 0.89616.
        let times = linspace(0.0, 3.0, 600);
        let res = kijowski_distribution(&reference(), &times, Execution::default()).unwrap();
        let h = times[1] - times[0];
        assert!((res.distribution.argmax() - 0.89616).abs() <= h);
        assert!((res.distribution.peak() - 1.55416).abs() < 2e-4);
    }

    #[test]
    fn time_reversal_swaps_movers() {
        let wf = reference();
        let times: Vec<f64> = linspace(-2.0, 2.0, 41);
        let neg: Vec<f64> = times.iter().rev().map(|t| -t).collect();
        let a = kijowski_distribution(&wf, &times, Execution::default()).unwrap().amplitudes;
        let b = kijowski_distribution(&wf.conjugated(), &neg, Execution::default()).unwrap().amplitudes;
        let n = times.len();
        for i in 0..n {
            assert!((a.plus[i] - b.minus[n - 1 - i].conj()).norm() < 1e-10);
            assert!((a.minus[i] - b.plus[n - 1 - i].conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn padding_covers_the_time_window() {
        let wf = reference();
        assert_eq!(required_padding(&wf, &[0.0, 1.0]), 1);
        let f = required_padding(&wf, &[-6.0, 6.0]);
        let bw = wf.to_momentum().bandwidth();
        assert!(bw * wf.grid().dk() / f as f64 * 6.0 < PI);
        assert!(bw * wf.grid().dk() / (f / 2) as f64 * 6.0 >= PI);
    }

    #[test]
    fn full_line_integral_is_one() {
        let times = linspace(-6.0, 6.0, 2401);
        let res = kijowski_distribution(&reference(), &times, Execution::default()).unwrap();
        let total = trapezoid(res.distribution.times(), res.distribution.density());
        assert!((total - 1.0).abs() < 1e-3, "total {total}");
    }
}
