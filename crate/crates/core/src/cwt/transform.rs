use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{check_scales, morlet_spectrum, MorletParams, ScalogramGrid};
use crate::error::{domain, Result};
use crate::series::TimeSeries;

fn check_taus(taus: &[f64]) -> Result<()> {
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(domain("translations must be finite"));
    }
    Ok(())
}

/// Time-domain quadrature of the transform on the zero-padded signal.
///
/// The trapezoid rule over a zero-extended uniform grid gives every sample
/// unit weight; the integrand is cut where the wavelet envelope drops below
/// [`super::ENVELOPE_CUTOFF`]. Translations may be arbitrary.
pub fn cwt_direct(
    signal: &TimeSeries,
    scales: &[f64],
    taus: &[f64],
    params: &MorletParams,
) -> Result<ScalogramGrid> {
    check_scales(scales)?;
    check_taus(taus)?;
    let f = signal.samples();
    let (t0, dt) = (signal.t0(), signal.dt());
    let n = f.len() as isize;
    let half = params.support_half_width();
    let norm = PI.powf(-0.25);

    let rows: Vec<Vec<Complex64>> = scales
        .par_iter()
        .map(|&s| {
            let reach = half * s;
            let weight = dt / s.sqrt();
            taus.iter()
                .map(|&tau| {
                    let lo = (((tau - reach - t0) / dt).ceil() as isize).max(0);
                    let hi = (((tau + reach - t0) / dt).floor() as isize).min(n - 1);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in lo..=hi {
                        let y = (t0 + i as f64 * dt - tau) / s;
                        // conj(phi(y))
                        acc += Complex64::from_polar(
                            f[i as usize] * norm * (-0.5 * y * y).exp(),
                            -params.omega0 * y,
                        );
                    }
                    acc * weight
                })
                .collect()
        })
        .collect();

    Ok(ScalogramGrid::from_rows(
        taus.to_vec(),
        scales.to_vec(),
        rows,
        params,
        signal.t0(),
        signal.end(),
    ))
}

/// Frequency-domain evaluation: the signal spectrum is multiplied per scale by
/// the closed-form Morlet spectrum and inverse transformed.
///
/// `taus` must lie on the signal's sample grid.
pub fn cwt_fast(
    signal: &TimeSeries,
    scales: &[f64],
    taus: &[f64],
    params: &MorletParams,
) -> Result<ScalogramGrid> {
    check_scales(scales)?;
    check_taus(taus)?;
    let (t0, dt) = (signal.t0(), signal.dt());
    let n = signal.len();
    let indices = taus
        .iter()
        .map(|&tau| {
            let x = (tau - t0) / dt;
            let j = x.round();
            if (x - j).abs() > 1e-6 || j < 0.0 || j >= n as f64 {
                Err(domain(format!(
                    "translation {tau:e} is not on the signal grid"
                )))
            } else {
                Ok(j as usize)
            }
        })
        .collect::<Result<Vec<usize>>>()?;

    let s_max = scales[scales.len() - 1];
    let pad = (params.support_half_width() * s_max / dt).ceil() as usize + 1;
    let len = (n + 2 * pad).next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(len);

    let mut spectrum: Vec<Complex64> = signal
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(len)
        .collect();
    forward.process(&mut spectrum);

    let omega: Vec<f64> = (0..len)
        .map(|k| {
            let k = if k <= len / 2 {
                k as f64
            } else {
                k as f64 - len as f64
            };
            2.0 * PI * k / (len as f64 * dt)
        })
        .collect();

    let rows: Vec<Vec<Complex64>> = scales
        .par_iter()
        .map(|&s| {
            let gain = s.sqrt() / len as f64;
            let mut buf: Vec<Complex64> = spectrum
                .iter()
                .zip(&omega)
                .map(|(&x, &w)| x * (gain * morlet_spectrum(s * w, params)))
                .collect();
            let mut scratch = vec![Complex64::new(0.0, 0.0); inverse.get_inplace_scratch_len()];
            inverse.process_with_scratch(&mut buf, &mut scratch);
            indices.iter().map(|&j| buf[j]).collect()
        })
        .collect();

    Ok(ScalogramGrid::from_rows(
        taus.to_vec(),
        scales.to_vec(),
        rows,
        params,
        signal.t0(),
        signal.end(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_signal() -> TimeSeries {
        TimeSeries::new(0.0, 1.0, vec![0.0; 256]).unwrap()
    }

    #[test]
    fn zero_signal_gives_zero_grid() {
        let s = zero_signal();
        let taus: Vec<f64> = (0..256).map(f64::from).collect();
        let p = MorletParams::default();
        for grid in [
            cwt_direct(&s, &[2.0, 4.0], &taus, &p).unwrap(),
            cwt_fast(&s, &[2.0, 4.0], &taus, &p).unwrap(),
        ] {
            assert!(grid.energy().iter().flatten().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn fast_requires_grid_translations() {
        let s = zero_signal();
        let p = MorletParams::default();
        assert!(cwt_fast(&s, &[2.0], &[1.5], &p).is_err());
        assert!(cwt_fast(&s, &[2.0], &[300.0], &p).is_err());
        assert!(cwt_direct(&s, &[2.0], &[1.5], &p).is_ok());
        assert!(cwt_direct(&s, &[], &[1.0], &p).is_err());
        assert!(cwt_direct(&s, &[2.0, 1.0], &[1.0], &p).is_err());
    }

    #[test]
    fn energy_is_modulus_squared() {
        let samples: Vec<f64> = (0..300).map(|i| (0.3 * i as f64).sin()).collect();
        let s = TimeSeries::new(0.0, 1.0, samples).unwrap();
        let taus: Vec<f64> = (0..300).step_by(3).map(|i| i as f64).collect();
        let g = cwt_fast(&s, &[3.0, 5.0, 9.0], &taus, &MorletParams::default()).unwrap();
        for (vr, er) in g.values().iter().zip(g.energy()) {
            for (v, e) in vr.iter().zip(er) {
                assert_eq!(v.norm_sqr(), *e);
            }
        }
    }
}
