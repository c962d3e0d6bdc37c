use crate::error::{Error, Result};

/// Arrival-time density on a time grid together with its trapezoidal
/// cumulative distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalDistribution {
    times: Vec<f64>,
    density: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ArrivalDistribution {
    pub fn from_density(times: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if density.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), got: density.len() });
        }
        if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::BadTimeGrid);
        }
        // Round-off can leave a density of −0.0 or −1e-300 after subtraction.
        let density: Vec<f64> = density.into_iter().map(|p| p.max(0.0)).collect();
        let cumulative = cumulative_trapezoid(&times, &density);
        Ok(Self { times, density, cumulative })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Time of the largest density value (first one on ties).
    pub fn argmax(&self) -> f64 {
        let mut best = 0;
        for (i, p) in self.density.iter().enumerate() {
            if *p > self.density[best] {
                best = i;
            }
        }
        self.times[best]
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }

    /// Rescale so that the total probability is one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if !(total > 0.0) {
            return Err(Error::ZeroTotal);
        }
        Ok(Self {
            times: self.times.clone(),
            density: self.density.iter().map(|p| p / total).collect(),
            cumulative: self.cumulative.iter().map(|c| c / total).collect(),
        })
    }

    /// Linear interpolation of the density at `t`; zero outside the grid.
    pub fn density_at(&self, t: f64) -> f64 {
        interpolate(&self.times, &self.density, t)
    }

    /// Resample the density onto another time grid by linear interpolation.
    pub fn resampled(&self, times: &[f64]) -> Result<Self> {
        let density = times.iter().map(|&t| self.density_at(t)).collect();
        Self::from_density(times.to_vec(), density)
    }
}

pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..values.len() {
        acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        out.push(acc);
    }
    out
}

pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    *cumulative_trapezoid(times, values).last().unwrap_or(&0.0)
}

/// Evenly spaced grid of `points` values covering `[start, end]`.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (end - start) / (points - 1) as f64;
            (0..points).map(|i| start + i as f64 * h).collect()
        }
    }
}

pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return ys[0];
    }
    if i >= n {
        return ys[n - 1];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let s = (x - x0) / (x1 - x0);
    ys[i - 1] + s * (ys[i] - ys[i - 1])
}
