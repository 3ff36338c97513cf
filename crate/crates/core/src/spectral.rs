//! One-sided power spectrum of a time series and extraction of band centers.
//!
//! Normalization: with `X_k` the DFT of the mean-subtracted (optionally
//! tapered) signal zero-padded to `L` points, the one-sided power is
//! `|X_0|^2 / L`, `2 |X_k|^2 / L` for `0 < k < L/2` and `|X_{L/2}|^2 / L`.
//! Parseval then gives `sum(power) = sum((x_i - mean)^2)` exactly (times the
//! taper, when one is applied).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::series::TimeSeries;

pub const MIN_SPECTRUM_SAMPLES: usize = 16;

/// Above-threshold bins separated by less than this fraction of their
/// frequency belong to one band. A band of a quasi-periodic signal is a comb
/// of resolved lines, so strict bin contiguity would split it.
pub const BAND_MERGE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Taper {
    #[default]
    None,
    Hann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    /// Frequency step, `1 / (L dt)`.
    pub df: f64,
    /// Power at `k * df`, `k = 0..=L/2`.
    pub power: Vec<f64>,
    /// Transform length `L` after zero padding.
    pub transform_len: usize,
}

impl SpectralDensity {
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 * self.df
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPeak {
    pub frequency: f64,
    /// Summed power of the band.
    pub power: f64,
    /// Harmonic index relative to the lowest band, when the ratio is close to an integer.
    pub harmonic_index: Option<u32>,
}

pub fn power_spectrum(series: &TimeSeries, taper: Taper) -> Result<SpectralDensity> {
    let n = series.len();
    if n < MIN_SPECTRUM_SAMPLES {
        return Err(domain(format!(
            "power spectrum needs at least {MIN_SPECTRUM_SAMPLES} samples, got {n}"
        )));
    }
    let mean = series.samples().iter().sum::<f64>() / n as f64;
    let len = n.next_power_of_two();
    let window = |i: usize| match taper {
        Taper::None => 1.0,
        Taper::Hann => 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos(),
    };
    let mut buf: Vec<Complex64> = series
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &v)| Complex64::new((v - mean) * window(i), 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(len)
        .collect();
    FftPlanner::<f64>::new()
        .plan_fft_forward(len)
        .process(&mut buf);

    let half = len / 2;
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() / len as f64;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    Ok(SpectralDensity {
        df: 1.0 / (len as f64 * series.dt()),
        power,
        transform_len: len,
    })
}

/// Groups above-threshold bins (threshold `rel_threshold * max(power)`, DC
/// excluded) into bands and reports each band's power-weighted centroid.
/// Bins closer than [`BAND_MERGE_FRACTION`] of their frequency join one band.
///
/// The `max_bands` strongest bands are kept and returned in ascending
/// frequency. Harmonic indices are the nearest integer ratio to the lowest
/// kept band, left unassigned when that ratio is more than 0.2 from an integer.
pub fn band_centers(
    spectrum: &SpectralDensity,
    max_bands: usize,
    rel_threshold: f64,
) -> Result<Vec<BandPeak>> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(domain(format!(
            "relative threshold must lie in (0, 1), got {rel_threshold}"
        )));
    }
    let peak = spectrum.power.iter().skip(1).copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Ok(Vec::new());
    }
    let level = rel_threshold * peak;

    let mut bands: Vec<BandPeak> = Vec::new();
    let mut last_f = f64::NEG_INFINITY;
    for (k, &p) in spectrum.power.iter().enumerate().skip(1) {
        if p < level {
            continue;
        }
        let f = spectrum.frequency(k);
        match bands.last_mut() {
            Some(b) if f - last_f <= BAND_MERGE_FRACTION * last_f => {
                // running centroid kept as moment / weight in (frequency, power)
                b.frequency += p * f;
                b.power += p;
            }
            _ => bands.push(BandPeak {
                frequency: p * f,
                power: p,
                harmonic_index: None,
            }),
        }
        last_f = f;
    }
    for b in &mut bands {
        b.frequency /= b.power;
    }

    bands.sort_by(|a, b| b.power.total_cmp(&a.power));
    bands.truncate(max_bands);
    bands.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));

    if let Some(lowest) = bands.first().map(|b| b.frequency) {
        for b in &mut bands {
            let ratio = b.frequency / lowest;
            let p = ratio.round();
            if (ratio - p).abs() <= 0.2 {
                b.harmonic_index = Some(p as u32);
            }
        }
    }
    Ok(bands)
}
