//! Wave-packet model: level energies, Gaussian level populations, the
//! classical and revival time scales, and synthesis of the autocorrelation
//! power `f(t) = |A(t)|^2`.
//!
//! Atomic units throughout (`hbar = 1`). Only the populations `|c_n|^2` and the
//! energies `E_n` enter the signal, so no spatial eigenfunctions are modelled.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::series::TimeSeries;

/// Largest tolerated imaginary part of the double sum before it is treated as
/// an energy-law bug.
pub const IMAGINARY_RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyLaw {
    /// `E_n = -1 / (2 n^2)`.
    #[default]
    ExactHydrogenic,
    /// Second-order expansion about the mean level with the overall phase dropped.
    QuadraticApprox,
}

/// How the width parameter of the level distribution is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WidthConvention {
    /// `sigma` is the standard deviation: `exp(-(n - nbar)^2 / (2 sigma^2))`.
    #[default]
    StdDev,
    /// `sigma` is the full width at half maximum: `exp(-4 ln2 (n - nbar)^2 / sigma^2)`.
    Fwhm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketModel {
    /// Mean principal quantum number.
    pub n_mean: u32,
    /// `n_max - n_min` of the populated support.
    pub n_span: u32,
    pub sigma: f64,
    pub width: WidthConvention,
    pub energy_law: EnergyLaw,
}

/// Classical period and revival time of a model, in atomic units of time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScales {
    pub classical: f64,
    pub revival: f64,
}

impl TimeScales {
    /// Frequency of the lowest beat, `1 / T_cl`.
    pub fn fundamental(&self) -> f64 {
        1.0 / self.classical
    }

    pub fn harmonic_frequency(&self, p: u32) -> f64 {
        p as f64 / self.classical
    }

    /// `T_rev / (2p)`, the spacing of the patch lattice in row `p`.
    pub fn lattice_spacing(&self, p: u32) -> f64 {
        self.revival / (2.0 * p as f64)
    }
}

/// One populated level: quantum number, population `|c_n|^2` and energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub n: u32,
    pub weight: f64,
    pub energy: f64,
}

/// Normalized populations `|c_n|^2` over `[n_min, n_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution {
    n_min: u32,
    weights: Vec<f64>,
}

impl WeightDistribution {
    /// Wraps explicit populations starting at `n_min`. They must be
    /// non-negative and sum to one within `1e-12`.
    pub fn new(n_min: u32, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(domain("empty level support"));
        }
        if n_min < 1 {
            return Err(domain("quantum numbers start at 1"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(domain("populations must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("populations sum to {total}, expected 1")));
        }
        Ok(Self { n_min, weights })
    }

    pub fn n_min(&self) -> u32 {
        self.n_min
    }

    pub fn n_max(&self) -> u32 {
        self.n_min + self.weights.len() as u32 - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, n: u32) -> Option<f64> {
        n.checked_sub(self.n_min)
            .and_then(|i| self.weights.get(i as usize).copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.n_min + i as u32, w))
    }

    /// Quantum number carrying the largest population.
    pub fn mode(&self) -> u32 {
        self.iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(n, _)| n)
            .unwrap_or(self.n_min)
    }
}

/// `E_n = -1 / (2 n^2)`.
pub fn hydrogenic_energy(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(domain("principal quantum number must be >= 1"));
    }
    let n = n as f64;
    Ok(-1.0 / (2.0 * n * n))
}

/// `T_cl = 2 pi nbar^3` and `T_rev = (2/3) nbar T_cl`.
pub fn time_scales(n_mean: u32) -> Result<TimeScales> {
    if n_mean < 2 {
        return Err(domain(format!(
            "mean quantum number must be >= 2, got {n_mean}"
        )));
    }
    let n = n_mean as f64;
    let classical = 2.0 * PI * n * n * n;
    Ok(TimeScales {
        classical,
        revival: 2.0 * classical * n / 3.0,
    })
}

/// Smallest positive integer `q` for which the quadratic-law signal repeats
/// after `q T_rev`: `q T_rev / T_cl = 2 q nbar / 3` must be an integer.
pub fn quadratic_recurrence_multiple(n_mean: u32) -> u32 {
    if n_mean.is_multiple_of(3) {
        1
    } else {
        3
    }
}

/// Sampling step that oversamples the `p_max`-th beat eight times.
pub fn default_time_step(scales: &TimeScales, p_max: u32) -> f64 {
    scales.classical / (8.0 * p_max.max(1) as f64)
}

impl WavePacketModel {
    /// `nbar = 320`, `dn = 40`, `sigma = 2.5`, exact hydrogenic energies.
    pub fn rydberg_circular() -> Self {
        Self {
            n_mean: 320,
            n_span: 40,
            sigma: 2.5,
            width: WidthConvention::StdDev,
            energy_law: EnergyLaw::ExactHydrogenic,
        }
    }

    pub fn with_energy_law(mut self, law: EnergyLaw) -> Self {
        self.energy_law = law;
        self
    }

    pub fn with_width(mut self, width: WidthConvention) -> Self {
        self.width = width;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_mean < 2 {
            return Err(domain(format!("n_mean must be >= 2, got {}", self.n_mean)));
        }
        if self.n_span == 0 || self.n_span >= self.n_mean {
            return Err(domain(format!(
                "n_span must satisfy 0 < n_span < n_mean, got {} (n_mean {})",
                self.n_span, self.n_mean
            )));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(domain(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn time_scales(&self) -> Result<TimeScales> {
        time_scales(self.n_mean)
    }

    /// `E_n = 2 pi [ (n - nbar)/T_cl + (n - nbar)^2/T_rev ]`.
    pub fn quadratic_energy(&self, n: u32) -> Result<f64> {
        let ts = self.time_scales()?;
        Ok(quadratic_energy_with(n, self.n_mean, &ts))
    }

    /// Level energy according to the configured law.
    pub fn energy(&self, n: u32) -> Result<f64> {
        match self.energy_law {
            EnergyLaw::ExactHydrogenic => hydrogenic_energy(n),
            EnergyLaw::QuadraticApprox => self.quadratic_energy(n),
        }
    }

    /// Gaussian populations over `[nbar - dn/2, nbar - dn/2 + dn]`, normalized
    /// to unit sum.
    pub fn gaussian_weights(&self) -> Result<WeightDistribution> {
        self.validate()?;
        let n_min = self.n_mean - self.n_span / 2;
        let exponent_scale = match self.width {
            WidthConvention::Fwhm => 4.0 * LN_2 / (self.sigma * self.sigma),
            WidthConvention::StdDev => 1.0 / (2.0 * self.sigma * self.sigma),
        };
        let raw: Vec<f64> = (0..=self.n_span)
            .map(|i| {
                let d = (n_min + i) as f64 - self.n_mean as f64;
                (-exponent_scale * d * d).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(domain("level distribution has no populated levels"));
        }
        WeightDistribution::new(n_min, raw.into_iter().map(|w| w / total).collect())
    }

    /// Populated levels with their energies.
    pub fn levels(&self) -> Result<Vec<Level>> {
        let weights = self.gaussian_weights()?;
        let ts = self.time_scales()?;
        weights
            .iter()
            .map(|(n, weight)| {
                let energy = match self.energy_law {
                    EnergyLaw::ExactHydrogenic => hydrogenic_energy(n)?,
                    EnergyLaw::QuadraticApprox => quadratic_energy_with(n, self.n_mean, &ts),
                };
                Ok(Level { n, weight, energy })
            })
            .collect()
    }

    /// `f(t) = sum_{n,m} |c_n|^2 |c_m|^2 exp(-i E_nm t)` sampled on `t0 + i dt`.
    pub fn autocorrelation_power(&self, t0: f64, dt: f64, n_samples: usize) -> Result<TimeSeries> {
        autocorrelation_power(&self.levels()?, t0, dt, n_samples)
    }
}

fn quadratic_energy_with(n: u32, n_mean: u32, ts: &TimeScales) -> f64 {
    let d = n as f64 - n_mean as f64;
    2.0 * PI * (d / ts.classical + d * d / ts.revival)
}

/// Evaluates the double sum over level pairs at one time, returning the real
/// and imaginary parts.
fn pair_sum(pairs: &[(f64, f64)], t: f64) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for &(w, e) in pairs {
        let (s, c) = (e * t).sin_cos();
        re += w * c;
        im -= w * s;
    }
    (re, im)
}

/// Autocorrelation power of an arbitrary set of populated levels.
///
/// The imaginary part of the double sum cancels pairwise; a residual above
/// [`IMAGINARY_RESIDUAL_LIMIT`] is reported as [`Error::Consistency`].
pub fn autocorrelation_power(
    levels: &[Level],
    t0: f64,
    dt: f64,
    n_samples: usize,
) -> Result<TimeSeries> {
    if !(dt > 0.0) {
        return Err(domain(format!("time step must be positive, got {dt}")));
    }
    if n_samples < 2 {
        return Err(domain("need at least 2 samples"));
    }
    let pairs: Vec<(f64, f64)> = levels
        .iter()
        .flat_map(|a| {
            levels
                .iter()
                .map(move |b| (a.weight * b.weight, a.energy - b.energy))
        })
        .collect();

    let values: Vec<(f64, f64)> = (0..n_samples)
        .into_par_iter()
        .map(|i| pair_sum(&pairs, t0 + i as f64 * dt))
        .collect();
    real_series(t0, dt, values)
}

fn real_series(t0: f64, dt: f64, values: Vec<(f64, f64)>) -> Result<TimeSeries> {
    if let Some((i, &(_, im))) = values
        .iter()
        .enumerate()
        .find(|(_, v)| v.1.abs() > IMAGINARY_RESIDUAL_LIMIT)
    {
        return Err(Error::Consistency(format!(
            "imaginary residual {im:e} at sample {i} exceeds {IMAGINARY_RESIDUAL_LIMIT:e}"
        )));
    }
    TimeSeries::new(t0, dt, values.into_iter().map(|v| v.0).collect())
}

/// Largest imaginary residual of the double sum over the given times.
pub fn imaginary_residual(levels: &[Level], times: &[f64]) -> f64 {
    let pairs: Vec<(f64, f64)> = levels
        .iter()
        .flat_map(|a| {
            levels
                .iter()
                .map(move |b| (a.weight * b.weight, a.energy - b.energy))
        })
        .collect();
    times
        .iter()
        .map(|&t| pair_sum(&pairs, t).1.abs())
        .fold(0.0, f64::max)
}

/// Multiplies the series by `exp(-t / lifetime)`. An infinite lifetime leaves it unchanged.
pub fn apply_decay(series: &TimeSeries, lifetime: f64) -> Result<TimeSeries> {
    if !(lifetime > 0.0) {
        return Err(domain(format!("lifetime must be positive, got {lifetime}")));
    }
    let samples = series
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| v * (-series.time(i) / lifetime).exp())
        .collect();
    TimeSeries::new(series.t0(), series.dt(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> WavePacketModel {
        WavePacketModel::rydberg_circular()
    }

    #[test]
    fn hydrogenic_energy_values() {
        assert_eq!(hydrogenic_energy(1).unwrap(), -0.5);
        assert_eq!(hydrogenic_energy(320).unwrap(), -4.8828125e-6);
        assert!(hydrogenic_energy(2).unwrap() > hydrogenic_energy(1).unwrap());
        assert!(matches!(hydrogenic_energy(0), Err(Error::Domain(_))));
    }

    #[test]
    fn time_scale_values() {
        let ts = time_scales(320).unwrap();
        // 2 pi 320^3 and (640/3) of that, by hand
        assert!((ts.classical / 2.058_874_161_456e8 - 1.0).abs() < 1e-9);
        assert!((ts.revival / 4.392_264_877_773e10 - 1.0).abs() < 1e-9);
        let ts3 = time_scales(3).unwrap();
        assert!((ts3.revival / ts3.classical - 2.0).abs() < 1e-15);
        assert!(time_scales(1).is_err());
    }

    #[test]
    fn quadratic_energy_shape() {
        let m = reference();
        let ts = m.time_scales().unwrap();
        assert_eq!(m.quadratic_energy(320).unwrap(), 0.0);
        let up = m.quadratic_energy(321).unwrap();
        let down = m.quadratic_energy(319).unwrap();
        assert!((up - 3.0661e-8).abs() < 1e-12);
        let quad = 2.0 * PI / ts.revival;
        // the quadratic term is shared, the linear term flips sign
        assert!(((up + down) / 2.0 - quad).abs() < 1e-20);
        assert!(((up - down) / 2.0 - 2.0 * PI / ts.classical).abs() < 1e-20);
    }

    #[test]
    fn weights_support_and_peak() {
        for width in [WidthConvention::StdDev, WidthConvention::Fwhm] {
            let w = reference().with_width(width).gaussian_weights().unwrap();
            assert_eq!((w.n_min(), w.n_max()), (300, 340));
            assert!((w.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(w.mode(), 320);
        }
    }

    #[test]
    fn fwhm_convention_halves_at_half_width() {
        let sigma: f64 = 2.5;
        let at = |d: f64| (-4.0 * LN_2 * d * d / (sigma * sigma)).exp();
        assert!((at(sigma / 2.0) - 0.5).abs() < 1e-15);
        // and the implementation uses the same exponent
        let m = reference().with_width(WidthConvention::Fwhm);
        let w = m.gaussian_weights().unwrap();
        let ratio = w.get(321).unwrap() / w.get(320).unwrap();
        assert!((ratio - at(1.0)).abs() < 1e-14);
    }

    #[test]
    fn odd_span_keeps_span() {
        let m = WavePacketModel {
            n_span: 5,
            ..reference()
        };
        let w = m.gaussian_weights().unwrap();
        assert_eq!(w.n_max() - w.n_min(), 5);
        assert_eq!(w.mode(), 320);
    }

    #[test]
    fn invalid_models() {
        let m = reference();
        assert!(WavePacketModel { n_span: 0, ..m }.validate().is_err());
        assert!(WavePacketModel { n_span: 320, ..m }.validate().is_err());
        assert!(WavePacketModel { sigma: 0.0, ..m }.validate().is_err());
        assert!(WavePacketModel {
            n_mean: 1,
            n_span: 1,
            ..m
        }
        .validate()
        .is_err());
        let tiny = WavePacketModel { sigma: 1e-3, ..m };
        assert!(tiny.gaussian_weights().is_ok());
        assert!(WeightDistribution::new(10, vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn unit_peak_at_origin() {
        let s = reference().autocorrelation_power(0.0, 1.0e6, 4).unwrap();
        assert!((s.samples()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_samples_minimal_series() {
        let s = reference().autocorrelation_power(0.0, 1.0, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.samples()[0] - 1.0).abs() < 1e-12);
        assert!(reference().autocorrelation_power(0.0, 1.0, 1).is_err());
        assert!(reference().autocorrelation_power(0.0, -1.0, 3).is_err());
    }

    #[test]
    fn imaginary_residual_is_a_consistency_error() {
        let levels = vec![
            Level {
                n: 1,
                weight: 0.5,
                energy: 0.0,
            },
            Level {
                n: 2,
                weight: 0.5,
                energy: 1.0,
            },
        ];
        assert!(imaginary_residual(&levels, &[0.3, 1.7]) < 1e-15);
        // a pair list without its mirror image leaves an imaginary part
        let lopsided = [(0.25, 0.0), (0.25, 1.0), (0.5, 0.0)];
        let v = vec![pair_sum(&lopsided, 0.0), pair_sum(&lopsided, 1.0)];
        assert!(matches!(
            real_series(0.0, 1.0, v),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn decay_envelope() {
        let s = TimeSeries::new(0.0, 0.5, vec![2.0; 5]).unwrap();
        let d = apply_decay(&s, 1.0).unwrap();
        assert_eq!(d.samples()[0], 2.0);
        assert!((d.samples()[2] - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!(d.samples().windows(2).all(|w| w[1] < w[0]));
        let same = apply_decay(&s, f64::INFINITY).unwrap();
        assert_eq!(same, s);
        assert!(apply_decay(&s, 0.0).is_err());
        assert!(apply_decay(&s, -2.0).is_err());
    }

    #[test]
    fn recurrence_multiple() {
        assert_eq!(quadratic_recurrence_multiple(320), 3);
        assert_eq!(quadratic_recurrence_multiple(321), 1);
    }
}
