use crate::error::{domain, Result};

/// Uniformly sampled real signal, times in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t0: f64,
    dt: f64,
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(domain(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        if !t0.is_finite() {
            return Err(domain("time origin must be finite"));
        }
        if samples.len() < 2 {
            return Err(domain(format!(
                "a time series needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(domain(format!("sample {i} is not finite")));
        }
        Ok(Self { t0, dt, samples })
    }

    /// Builds a series from explicit sample times, which must be uniformly spaced
    /// to within `1e-9` of the mean step.
    pub fn from_times(times: &[f64], values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(domain("times and values differ in length"));
        }
        if times.len() < 2 {
            return Err(domain("a time series needs at least 2 samples"));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        for (i, w) in times.windows(2).enumerate() {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs() {
                return Err(domain(format!("non-uniform sampling at index {}", i + 1)));
            }
        }
        Self::new(times[0], dt, values)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Time of the last sample.
    pub fn end(&self) -> f64 {
        self.time(self.samples.len() - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(|i| self.time(i))
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Keeps the samples with `t <= t_max`.
    pub fn truncate_at(&self, t_max: f64) -> Result<Self> {
        let keep = self.times().take_while(|&t| t <= t_max).count();
        Self::new(self.t0, self.dt, self.samples[..keep].to_vec())
    }

    /// Returns `(index, time, value)` of the largest sample within `[from, to]`.
    pub fn argmax_in(&self, from: f64, to: f64) -> Option<(usize, f64, f64)> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, self.time(i), v))
            .filter(|&(_, t, _)| t >= from && t <= to)
            .max_by(|a, b| a.2.total_cmp(&b.2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_construction() {
        assert!(TimeSeries::new(0.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(TimeSeries::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(TimeSeries::new(0.0, 1.0, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn non_uniform_times_rejected() {
        let t = [0.0, 1.0, 2.5, 3.0];
        assert!(TimeSeries::from_times(&t, vec![0.0; 4]).is_err());
        let t = [1.0, 1.5, 2.0, 2.5];
        let s = TimeSeries::from_times(&t, vec![0.0; 4]).unwrap();
        assert_eq!(s.dt(), 0.5);
        assert_eq!(s.end(), 2.5);
    }

    #[test]
    fn truncation_keeps_prefix() {
        let s = TimeSeries::new(0.0, 1.0, (0..10).map(f64::from).collect()).unwrap();
        let t = s.truncate_at(4.0).unwrap();
        assert_eq!(t.samples(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
    }
}
