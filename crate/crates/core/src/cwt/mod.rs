//! Continuous wavelet transform with the Morlet mother wavelet.
//!
//! The transform uses the `1/sqrt(s)` normalization
//!
//! ```text
//! T(s, tau) = 1/sqrt(s) * integral f(t) conj(phi((t - tau) / s)) dt
//! ```
//!
//! rather than the `1/sqrt(|s|)` L2 convention combined with a rescaled
//! analytic spectrum found in most libraries. For a pure tone the magnitude
//! therefore grows like `sqrt(s)` across scales.
//!
//! Two evaluation routes are provided: [`cwt_direct`] integrates in the time
//! domain, [`cwt_fast`] multiplies by the closed-form Morlet spectrum in the
//! frequency domain. They agree to roundoff away from the cone of influence.

mod morlet;
mod transform;

pub use morlet::{
    frequency_for_scale, morlet, morlet_spectrum, rms_bandwidth, rms_duration, scale_for_frequency,
    MorletParams, DEFAULT_OMEGA0, ENVELOPE_CUTOFF, MIN_OMEGA0,
};
pub use transform::{cwt_direct, cwt_fast};

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::series::TimeSeries;
use crate::wavepacket::TimeScales;

/// Distance from a signal edge, in units of the scale, inside which transform
/// values are contaminated by the zero padding.
pub const CONE_OF_INFLUENCE: f64 = 4.0;

pub const DEFAULT_VOICES_PER_OCTAVE: u32 = 8;

/// Complex transform values and their energy over a scale x translation lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalogramGrid {
    taus: Vec<f64>,
    scales: Vec<f64>,
    /// One row per scale.
    values: Vec<Vec<Complex64>>,
    energy: Vec<Vec<f64>>,
    omega0: f64,
    signal_start: f64,
    signal_end: f64,
}

impl ScalogramGrid {
    pub(crate) fn from_rows(
        taus: Vec<f64>,
        scales: Vec<f64>,
        values: Vec<Vec<Complex64>>,
        params: &MorletParams,
        signal_start: f64,
        signal_end: f64,
    ) -> Self {
        let energy = values
            .iter()
            .map(|row| row.iter().map(|v| v.norm_sqr()).collect())
            .collect();
        Self {
            taus,
            scales,
            values,
            energy,
            omega0: params.omega0,
            signal_start,
            signal_end,
        }
    }

    /// Builds a grid holding only energies, e.g. for testing detectors on
    /// planted patterns. Complex values are set to `sqrt(energy)`.
    pub fn from_energy(
        taus: Vec<f64>,
        scales: Vec<f64>,
        energy: Vec<Vec<f64>>,
        params: &MorletParams,
        signal_start: f64,
        signal_end: f64,
    ) -> Result<Self> {
        check_scales(&scales)?;
        if energy.len() != scales.len() || energy.iter().any(|r| r.len() != taus.len()) {
            return Err(domain("energy matrix does not match the grid dimensions"));
        }
        if energy.iter().flatten().any(|e| !(*e >= 0.0)) {
            return Err(domain("energies must be non-negative"));
        }
        let values = energy
            .iter()
            .map(|r| r.iter().map(|e| Complex64::new(e.sqrt(), 0.0)).collect())
            .collect();
        Ok(Self {
            taus,
            scales,
            values,
            energy,
            omega0: params.omega0,
            signal_start,
            signal_end,
        })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn energy(&self) -> &[Vec<f64>] {
        &self.energy
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn params(&self) -> MorletParams {
        MorletParams {
            omega0: self.omega0,
        }
    }

    pub fn signal_span(&self) -> (f64, f64) {
        (self.signal_start, self.signal_end)
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty() || self.scales.is_empty()
    }

    /// Translation interval `[lo, hi]` outside the cone of influence at a
    /// scale index. Empty (`lo > hi`) when the whole row is contaminated.
    pub fn valid_tau_range(&self, scale_idx: usize) -> (f64, f64) {
        let margin = CONE_OF_INFLUENCE * self.scales[scale_idx];
        (self.signal_start + margin, self.signal_end - margin)
    }

    pub fn in_cone(&self, scale_idx: usize, tau_idx: usize) -> bool {
        let (lo, hi) = self.valid_tau_range(scale_idx);
        let t = self.taus[tau_idx];
        t < lo || t > hi
    }

    /// True when the wavelet at this scale never clears both edges.
    pub fn fully_in_cone(&self, scale_idx: usize) -> bool {
        let (lo, hi) = self.valid_tau_range(scale_idx);
        lo > hi || self.taus.iter().all(|&t| t < lo || t > hi)
    }

    /// Index of the grid scale nearest to `scale` in log distance.
    pub fn nearest_scale_index(&self, scale: f64) -> Option<usize> {
        self.scales
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1.ln() - scale.ln())
                    .abs()
                    .total_cmp(&(b.1.ln() - scale.ln()).abs())
            })
            .map(|(i, _)| i)
    }
}

/// Energy matrix `|T|^2`, one row per scale.
pub fn scalogram(grid: &ScalogramGrid) -> Vec<Vec<f64>> {
    grid.energy.clone()
}

/// Energy along translation at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSlice {
    pub requested_scale: f64,
    /// Grid scale actually used.
    pub scale: f64,
    pub scale_index: usize,
    pub series: TimeSeries,
}

/// `|T(tau, s)|^2` at the grid scale nearest to `scale`.
pub fn scale_slice(grid: &ScalogramGrid, scale: f64) -> Result<ScaleSlice> {
    if grid.is_empty() {
        return Err(domain("empty scalogram"));
    }
    let (lo, hi) = (grid.scales[0], grid.scales[grid.scales.len() - 1]);
    let slack = 1e-9;
    if !(scale >= lo * (1.0 - slack) && scale <= hi * (1.0 + slack)) {
        return Err(domain(format!(
            "scale {scale:e} outside grid range [{lo:e}, {hi:e}]"
        )));
    }
    let idx = grid.nearest_scale_index(scale).expect("non-empty grid");
    let series = TimeSeries::from_times(&grid.taus, grid.energy[idx].clone())?;
    Ok(ScaleSlice {
        requested_scale: scale,
        scale: grid.scales[idx],
        scale_index: idx,
        series,
    })
}

pub(crate) fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() {
        return Err(domain("no scales requested"));
    }
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(domain("scales must be positive and finite"));
    }
    if scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("scales must be strictly increasing"));
    }
    Ok(())
}

/// Log-spaced scales from `s_min` with `voices` per octave, up to and
/// including the last scale not exceeding `s_max`.
pub fn log_scales(s_min: f64, s_max: f64, voices: u32) -> Result<Vec<f64>> {
    if !(s_min > 0.0) || !(s_max >= s_min) || voices == 0 {
        return Err(domain(format!(
            "invalid scale range [{s_min:e}, {s_max:e}] with {voices} voices"
        )));
    }
    let count = ((s_max / s_min).log2() * voices as f64 + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| s_min * 2f64.powf(i as f64 / voices as f64))
        .collect())
}

/// Scale range covering patch rows `1..=p_max`: `[0.7 s(p_max), 1.4 s(1)]`.
pub fn harmonic_scale_range(
    ts: &TimeScales,
    p_max: u32,
    params: &MorletParams,
) -> Result<(f64, f64)> {
    let s_hi = scale_for_frequency(ts.harmonic_frequency(1), params)?;
    let s_lo = scale_for_frequency(ts.harmonic_frequency(p_max.max(1)), params)?;
    Ok((0.7 * s_lo, 1.4 * s_hi))
}

/// Every `stride`-th sample time of the series.
pub fn tau_subgrid(series: &TimeSeries, stride: usize) -> Vec<f64> {
    (0..series.len())
        .step_by(stride.max(1))
        .map(|i| series.time(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_scale_grid() {
        let s = log_scales(1.0, 8.0, 4).unwrap();
        assert_eq!(s.len(), 13);
        assert!((s[12] - 8.0).abs() < 1e-12);
        assert!(log_scales(0.0, 1.0, 4).is_err());
        assert!(log_scales(2.0, 1.0, 4).is_err());
    }

    #[test]
    fn default_range_has_at_most_64_scales() {
        let ts = crate::wavepacket::time_scales(320).unwrap();
        let p = MorletParams::default();
        let (lo, hi) = harmonic_scale_range(&ts, 6, &p).unwrap();
        let s = log_scales(lo, hi, DEFAULT_VOICES_PER_OCTAVE).unwrap();
        assert!(s.len() <= 64);
        assert!(lo < scale_for_frequency(ts.harmonic_frequency(6), &p).unwrap());
        assert!(hi > scale_for_frequency(ts.harmonic_frequency(1), &p).unwrap());
    }

    #[test]
    fn slice_of_zero_grid_and_range_check() {
        let p = MorletParams::default();
        let taus: Vec<f64> = (0..50).map(f64::from).collect();
        let scales = vec![1.0, 2.0, 4.0];
        let grid =
            ScalogramGrid::from_energy(taus.clone(), scales, vec![vec![0.0; 50]; 3], &p, 0.0, 49.0)
                .unwrap();
        let sl = scale_slice(&grid, 2.5).unwrap();
        assert_eq!(sl.scale, 2.0);
        assert!(sl.series.samples().iter().all(|&v| v == 0.0));
        assert!(scale_slice(&grid, 0.5).is_err());
        assert!(scale_slice(&grid, 5.0).is_err());
        assert_eq!(scalogram(&grid), vec![vec![0.0; 50]; 3]);
    }

    #[test]
    fn cone_of_influence_mask() {
        let p = MorletParams::default();
        let taus: Vec<f64> = (0..101).map(f64::from).collect();
        let grid = ScalogramGrid::from_energy(
            taus,
            vec![1.0, 20.0],
            vec![vec![1.0; 101]; 2],
            &p,
            0.0,
            100.0,
        )
        .unwrap();
        assert!(grid.in_cone(0, 3));
        assert!(!grid.in_cone(0, 4));
        assert!(!grid.in_cone(0, 96));
        assert!(grid.in_cone(0, 97));
        assert!(grid.fully_in_cone(1));
        assert!(!grid.fully_in_cone(0));
    }
}
