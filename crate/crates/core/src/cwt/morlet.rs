use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

pub const DEFAULT_OMEGA0: f64 = 6.0;

/// Below this central frequency the zero-mean correction of the Morlet wavelet
/// is no longer negligible.
pub const MIN_OMEGA0: f64 = 5.0;

/// Envelope level at which the wavelet support is cut, `exp(-y^2/2) < 1e-8`.
pub const ENVELOPE_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorletParams {
    pub omega0: f64,
}

impl Default for MorletParams {
    fn default() -> Self {
        Self {
            omega0: DEFAULT_OMEGA0,
        }
    }
}

impl MorletParams {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0 >= MIN_OMEGA0) || !omega0.is_finite() {
            return Err(domain(format!(
                "Morlet central frequency must be >= {MIN_OMEGA0}, got {omega0}"
            )));
        }
        Ok(Self { omega0 })
    }

    /// Half-width of the truncated support in units of the scale.
    pub fn support_half_width(&self) -> f64 {
        (-2.0 * ENVELOPE_CUTOFF.ln()).sqrt()
    }
}

fn norm() -> f64 {
    PI.powf(-0.25)
}

/// `pi^{-1/4} exp(i omega0 t) exp(-t^2/2)`.
pub fn morlet(t: f64, params: &MorletParams) -> Complex64 {
    Complex64::from_polar(norm() * (-0.5 * t * t).exp(), params.omega0 * t)
}

/// Fourier transform `int phi(t) exp(-i w t) dt = pi^{-1/4} sqrt(2 pi) exp(-(w - omega0)^2 / 2)`.
/// Real for the Morlet wavelet.
pub fn morlet_spectrum(omega: f64, params: &MorletParams) -> f64 {
    let d = omega - params.omega0;
    norm() * (2.0 * PI).sqrt() * (-0.5 * d * d).exp()
}

/// `s = omega0 / (2 pi f)`.
pub fn scale_for_frequency(frequency: f64, params: &MorletParams) -> Result<f64> {
    if !(frequency > 0.0) {
        return Err(domain(format!(
            "frequency must be positive, got {frequency}"
        )));
    }
    Ok(params.omega0 / (2.0 * PI * frequency))
}

/// `f = omega0 / (2 pi s)`.
pub fn frequency_for_scale(scale: f64, params: &MorletParams) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(domain(format!("scale must be positive, got {scale}")));
    }
    Ok(params.omega0 / (2.0 * PI * scale))
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let inner: f64 = v.iter().sum();
    h * (inner - 0.5 * (v[0] + v[v.len() - 1]))
}

const QUAD_POINTS: usize = 2001;
const QUAD_SPAN: f64 = 12.0;

/// RMS duration of `phi(t/s)` about `t = 0`, by quadrature of the second moment
/// of `|phi(t/s)|^2`.
pub fn rms_duration(params: &MorletParams, scale: f64) -> f64 {
    let half = QUAD_SPAN * scale;
    let h = 2.0 * half / (QUAD_POINTS - 1) as f64;
    let ts = (0..QUAD_POINTS).map(move |i| -half + i as f64 * h);
    let density = |t: f64| morlet(t / scale, params).norm_sqr();
    let m2 = trapezoid(h, ts.clone().map(|t| t * t * density(t)));
    let m0 = trapezoid(h, ts.map(density));
    (m2 / m0).sqrt()
}

/// RMS bandwidth of `phi(t/s)` about `omega0 / s`. The spectrum is obtained by
/// quadrature of the Fourier integral rather than from its closed form.
pub fn rms_bandwidth(params: &MorletParams, scale: f64) -> f64 {
    let t_half = QUAD_SPAN * scale;
    let n_t = 1201;
    let ht = 2.0 * t_half / (n_t - 1) as f64;
    let samples: Vec<(f64, Complex64)> = (0..n_t)
        .map(|i| {
            let t = -t_half + i as f64 * ht;
            (t, morlet(t / scale, params))
        })
        .collect();
    let spectrum = |w: f64| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &(t, v)) in samples.iter().enumerate() {
            let edge = if i == 0 || i == n_t - 1 { 0.5 } else { 1.0 };
            acc += v * Complex64::from_polar(edge, -w * t);
        }
        (acc * ht).norm_sqr()
    };
    let center = params.omega0 / scale;
    let w_half = QUAD_SPAN / scale;
    let n_w = 601;
    let hw = 2.0 * w_half / (n_w - 1) as f64;
    let ws: Vec<f64> = (0..n_w).map(|i| center - w_half + i as f64 * hw).collect();
    let power: Vec<f64> = ws.iter().map(|&w| spectrum(w)).collect();
    let m2 = trapezoid(
        hw,
        ws.iter().zip(&power).map(|(w, p)| (w - center).powi(2) * p),
    );
    let m0 = trapezoid(hw, power.iter().copied());
    (m2 / m0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        let v = morlet(0.0, &MorletParams::default());
        assert!((v.re - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn envelope_is_even() {
        let p = MorletParams::default();
        for t in [0.1, 0.7, 1.9, 3.3] {
            assert!((morlet(t, &p).norm() - morlet(-t, &p).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_energy() {
        let p = MorletParams::default();
        let h = 16.0 / 4000.0;
        let e = trapezoid(
            h,
            (0..=4000).map(|i| morlet(-8.0 + i as f64 * h, &p).norm_sqr()),
        );
        assert!((e - 1.0).abs() < 1e-9);
    }

    #[test]
    fn omega0_lower_bound() {
        assert!(MorletParams::new(4.9).is_err());
        assert!(MorletParams::new(5.0).is_ok());
    }

    #[test]
    fn scale_frequency_round_trip() {
        let p = MorletParams::default();
        let f = 4.857e-9;
        let s = scale_for_frequency(f, &p).unwrap();
        assert!((s / 1.966e8 - 1.0).abs() < 1e-3);
        let back = frequency_for_scale(s, &p).unwrap();
        assert!((back / f - 1.0).abs() < 1e-15);
        assert!(scale_for_frequency(0.0, &p).is_err());
        assert!(frequency_for_scale(-1.0, &p).is_err());
    }

    #[test]
    fn resolution_at_unit_scale() {
        let p = MorletParams::default();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rms_duration(&p, 1.0) - half).abs() < 1e-6);
        assert!((rms_bandwidth(&p, 1.0) - half).abs() < 1e-6);
    }

    #[test]
    fn resolution_scaling_law() {
        let p = MorletParams::default();
        let (t1, w1) = (rms_duration(&p, 1.0), rms_bandwidth(&p, 1.0));
        let (t2, w2) = (rms_duration(&p, 2.0), rms_bandwidth(&p, 2.0));
        assert!((t2 / t1 - 2.0).abs() < 1e-9);
        assert!((w1 / w2 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn spectrum_matches_quadrature() {
        let p = MorletParams::default();
        let h = 24.0 / 3000.0;
        for w in [4.0, 6.0, 7.5] {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=3000 {
                let t = -12.0 + i as f64 * h;
                acc += morlet(t, &p) * Complex64::from_polar(h, -w * t);
            }
            assert!((acc.re - morlet_spectrum(w, &p)).abs() < 1e-10);
            assert!(acc.im.abs() < 1e-10);
        }
    }
}
