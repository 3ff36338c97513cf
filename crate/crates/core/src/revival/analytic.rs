use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Patch, PatchSource};
use crate::cwt::{scale_for_frequency, MorletParams};
use crate::error::{domain, Result};
use crate::wavepacket::{EnergyLaw, Level, TimeScales, WavePacketModel};

/// Closed-form transform of the autocorrelation power of `levels`:
///
/// `T(tau, s) = sqrt(2 pi s) sum_{n,m} w_n w_m pi^{-1/4} exp(-i E_nm tau) exp(-(omega0 + s E_nm)^2 / 2)`.
///
/// Diagonal terms (`E_nm = 0`) are kept.
pub fn analytic_cwt_levels(
    tau: f64,
    scale: f64,
    levels: &[Level],
    params: &MorletParams,
) -> Result<Complex64> {
    if !(scale > 0.0) {
        return Err(domain(format!("scale must be positive, got {scale}")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for a in levels {
        for b in levels {
            let e = a.energy - b.energy;
            let g = params.omega0 + scale * e;
            let amp = a.weight * b.weight * (-0.5 * g * g).exp();
            if amp != 0.0 {
                acc += Complex64::from_polar(amp, -e * tau);
            }
        }
    }
    Ok(acc * ((2.0 * PI * scale).sqrt() * PI.powf(-0.25)))
}

pub fn analytic_cwt(
    tau: f64,
    scale: f64,
    model: &WavePacketModel,
    params: &MorletParams,
) -> Result<Complex64> {
    analytic_cwt_levels(tau, scale, &model.levels()?, params)
}

/// Scale at which the Gaussian factor of the `(n, m)` term peaks:
/// `omega0 = -s E_nm`. Requires `E_nm < 0`.
pub fn patch_constraint_scale(e_nm: f64, params: &MorletParams) -> Result<f64> {
    if !(e_nm < 0.0) {
        return Err(domain(format!(
            "energy difference must be negative (m above n), got {e_nm:e}"
        )));
    }
    Ok(-params.omega0 / e_nm)
}

/// Patch centers `(p, k)` with `1 <= p <= p_max`, `k >= 1` and
/// `k T_rev / (2p) <= tau_max`, sorted by `p` then `tau`.
pub fn predicted_patch_grid(
    ts: &TimeScales,
    p_max: u32,
    tau_max: f64,
    params: &MorletParams,
) -> Result<Vec<Patch>> {
    let mut out = Vec::new();
    for p in 1..=p_max {
        let frequency = ts.harmonic_frequency(p);
        let scale = scale_for_frequency(frequency, params)?;
        let spacing = ts.lattice_spacing(p);
        let mut k = 1u32;
        loop {
            let tau = k as f64 * ts.revival / (2.0 * p as f64);
            if tau > tau_max * (1.0 + 1e-12) {
                break;
            }
            out.push(Patch {
                p: Some(p),
                k: Some(k),
                tau,
                frequency,
                scale,
                energy: 0.0,
                source: PatchSource::Predicted,
            });
            k += 1;
            debug_assert!(spacing > 0.0);
        }
    }
    Ok(out)
}

/// Largest distance to the nearest integer of `tau (E_{n,n+p} - E_{n',n'+p}) / (2 pi)`
/// over all `n, n'` with `n + p, n' + p` in the support. Zero when the beat
/// phases of row `p` all coincide at `tau`.
pub fn coherence_residual(tau: f64, p: u32, model: &WavePacketModel) -> Result<f64> {
    let model = model.with_energy_law(EnergyLaw::QuadraticApprox);
    let w = model.gaussian_weights()?;
    let (lo, hi) = (w.n_min(), w.n_max());
    if p == 0 || lo + p > hi {
        return Ok(0.0);
    }
    let beats: Vec<f64> = (lo..=hi - p)
        .map(|n| Ok(model.quadratic_energy(n)? - model.quadratic_energy(n + p)?))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in beats.iter().enumerate() {
        for b in &beats[i + 1..] {
            let x = tau * (a - b) / (2.0 * PI);
            worst = worst.max((x - x.round()).abs());
        }
    }
    Ok(worst)
}
