use std::collections::BTreeMap;

use super::Patch;
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    /// `1 / T_cl` when known. Otherwise it is inferred from the rows' frequency ratios.
    pub fundamental: Option<f64>,
    pub p_max: u32,
    /// Allowed relative mismatch between a row frequency and `p` times the fundamental.
    pub harmonic_tolerance: f64,
    /// Translation grid spacing; sets the variance floor of each row.
    pub tau_resolution: f64,
    /// Rows further than this (relative) from the weighted median are rejected.
    pub outlier_tolerance: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            fundamental: None,
            p_max: 8,
            harmonic_tolerance: 0.06,
            tau_resolution: 0.0,
            outlier_tolerance: 0.10,
        }
    }
}

impl EstimateOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(f) = self.fundamental {
            if !(f > 0.0) || !f.is_finite() {
                return Err(domain(format!(
                    "fundamental frequency must be positive, got {f}"
                )));
            }
        }
        if self.p_max == 0 {
            return Err(domain("p_max must be at least 1"));
        }
        if !(self.harmonic_tolerance > 0.0 && self.harmonic_tolerance < 0.5) {
            return Err(domain(format!(
                "harmonic tolerance must lie in (0, 0.5), got {}",
                self.harmonic_tolerance
            )));
        }
        if !(self.tau_resolution >= 0.0) || !self.tau_resolution.is_finite() {
            return Err(domain("tau resolution must be finite and non-negative"));
        }
        if !(self.outlier_tolerance > 0.0) {
            return Err(domain("outlier tolerance must be positive"));
        }
        Ok(())
    }
}

/// Revival time implied by one scale row of detections.
#[derive(Debug, Clone, PartialEq)]
pub struct RowEstimate {
    pub p: u32,
    pub scale: f64,
    pub frequency: f64,
    /// Translations used, ascending (a patch near `tau = 0` is dropped).
    pub taus: Vec<f64>,
    /// Lattice spacing `T_rev / (2p)` fitted to the row.
    pub spacing: f64,
    pub revival: f64,
    pub std_error: f64,
    /// False when rejected as an outlier.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevivalEstimate {
    pub revival: f64,
    pub std_error: f64,
    /// Fundamental frequency used to assign harmonics.
    pub fundamental: f64,
    pub rows: Vec<RowEstimate>,
    pub n_patches_used: usize,
    /// RMS of accepted row estimates about the combined value.
    pub residual_rms: f64,
}

impl RevivalEstimate {
    /// Copies of `detections` labelled with `(p, k)` on the fitted lattice.
    /// Detections whose frequency is not near a harmonic stay unlabelled.
    pub fn label(&self, detections: &[Patch], harmonic_tolerance: f64) -> Vec<Patch> {
        detections
            .iter()
            .map(|d| {
                let mut d = *d;
                if let Some(p) =
                    harmonic_of(d.frequency / self.fundamental, u32::MAX, harmonic_tolerance)
                {
                    d.p = Some(p);
                    let k = (d.tau * 2.0 * p as f64 / self.revival).round();
                    d.k = (k >= 0.0).then_some(k as u32);
                }
                d
            })
            .collect()
    }
}

fn harmonic_of(ratio: f64, p_max: u32, tol: f64) -> Option<u32> {
    let p = ratio.round();
    (p >= 1.0 && p <= p_max as f64 && (ratio - p).abs() <= tol * p).then_some(p as u32)
}

fn impossible(msg: impl Into<String>) -> Error {
    Error::EstimationImpossible(msg.into())
}

/// Recovers `T_rev` from detected patches.
///
/// Detections are grouped by scale row. Each row with at least two patches is
/// assigned a harmonic `p` (from the known fundamental, or else from the
/// integer base that makes the most rows consistent harmonics of the
/// slowest row). Its gaps, counted in multiples of the smallest gap, give the
/// lattice spacing `T_rev / (2p)`. Row estimates are combined by inverse
/// variance after rejecting outliers against their weighted median.
pub fn estimate_revival_time(
    detections: &[Patch],
    opts: &EstimateOptions,
) -> Result<RevivalEstimate> {
    opts.validate()?;
    let mut by_row: BTreeMap<u64, (f64, f64, Vec<f64>)> = BTreeMap::new();
    for d in detections {
        if !(d.scale > 0.0 && d.frequency > 0.0 && d.tau.is_finite()) {
            return Err(domain(
                "detections need positive scale and frequency and a finite tau",
            ));
        }
        by_row
            .entry(d.scale.to_bits())
            .or_insert((d.scale, d.frequency, Vec::new()))
            .2
            .push(d.tau);
    }
    let rows: Vec<(f64, f64, Vec<f64>)> = by_row.into_values().filter(|r| r.2.len() >= 2).collect();
    if rows.is_empty() {
        return Err(impossible("no scale row holds two or more patches"));
    }

    let tol = opts.harmonic_tolerance;
    let fundamental = match opts.fundamental {
        Some(f) => f,
        None => {
            let f_low = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let count = |b: u32| {
                rows.iter()
                    .filter(|r| harmonic_of(b as f64 * r.1 / f_low, opts.p_max, tol).is_some())
                    .count()
            };
            let best = (1..=opts.p_max)
                .max_by(|&a, &b| count(a).cmp(&count(b)).then(b.cmp(&a)))
                .expect("p_max >= 1");
            f_low / best as f64
        }
    };

    let mut estimates: Vec<RowEstimate> = rows
        .into_iter()
        .filter_map(|(scale, frequency, taus)| {
            let p = harmonic_of(frequency / fundamental, opts.p_max, tol)?;
            fit_row(p, scale, frequency, taus, opts.tau_resolution)
        })
        .collect();
    if estimates.is_empty() {
        return Err(impossible(
            "no row with two or more patches sits on a harmonic of the fundamental",
        ));
    }

    let median = weighted_median(&estimates);
    for r in &mut estimates {
        r.accepted = (r.revival / median - 1.0).abs() <= opts.outlier_tolerance;
    }
    let accepted: Vec<&RowEstimate> = estimates.iter().filter(|r| r.accepted).collect();
    let weights: Vec<f64> = accepted.iter().map(|r| r.std_error.powi(-2)).collect();
    let w_sum: f64 = weights.iter().sum();
    let revival = accepted
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * r.revival)
        .sum::<f64>()
        / w_sum;
    let residual_rms = (accepted
        .iter()
        .map(|r| (r.revival - revival).powi(2))
        .sum::<f64>()
        / accepted.len() as f64)
        .sqrt();
    let n_patches_used = accepted.iter().map(|r| r.taus.len()).sum();

    Ok(RevivalEstimate {
        revival,
        std_error: w_sum.powf(-0.5),
        fundamental,
        rows: estimates,
        n_patches_used,
        residual_rms,
    })
}

fn fit_row(
    p: u32,
    scale: f64,
    frequency: f64,
    mut taus: Vec<f64>,
    res: f64,
) -> Option<RowEstimate> {
    taus.sort_by(f64::total_cmp);
    let min_gap = |t: &[f64]| {
        t.windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    };
    let base = min_gap(&taus);
    taus.retain(|&t| t >= 0.5 * base);
    if taus.len() < 2 {
        return None;
    }
    let base = min_gap(&taus);
    if !(base > 0.0) {
        return None;
    }
    let gaps: Vec<f64> = taus.windows(2).map(|w| w[1] - w[0]).collect();
    let mult: Vec<f64> = gaps.iter().map(|g| (g / base).round().max(1.0)).collect();
    let m_sum: f64 = mult.iter().sum();
    let spacing = (taus[taus.len() - 1] - taus[0]) / m_sum;

    let var_fit = if gaps.len() >= 2 {
        let dev: f64 = gaps
            .iter()
            .zip(&mult)
            .map(|(g, m)| (g / m - spacing).powi(2))
            .sum();
        dev / ((gaps.len() - 1) * gaps.len()) as f64
    } else {
        0.0
    };
    let var_floor = (res * res / 6.0 / (m_sum * m_sum)).max((spacing * 1e-12).powi(2));
    let scale_factor = 2.0 * p as f64;
    Some(RowEstimate {
        p,
        scale,
        frequency,
        taus,
        spacing,
        revival: scale_factor * spacing,
        std_error: scale_factor * var_fit.max(var_floor).sqrt(),
        accepted: true,
    })
}

fn weighted_median(rows: &[RowEstimate]) -> f64 {
    let mut v: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.revival, r.std_error.powi(-2)))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let half = v.iter().map(|x| x.1).sum::<f64>() / 2.0;
    let mut acc = 0.0;
    for (x, w) in &v {
        acc += w;
        if acc >= half {
            return *x;
        }
    }
    v[v.len() - 1].0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revival::PatchSource;

    const T_REV: f64 = 4.0e10;
    const T_CL: f64 = 2.0e8;

    fn det(p: u32, tau: f64) -> Patch {
        let f = p as f64 / T_CL;
        Patch {
            p: None,
            k: None,
            tau,
            frequency: f,
            scale: 6.0 / (2.0 * std::f64::consts::PI * f),
            energy: 1.0,
            source: PatchSource::Detected,
        }
    }

    fn lattice(p: u32, k_max: u32) -> Vec<Patch> {
        (1..=k_max)
            .map(|k| det(p, k as f64 * T_REV / (2.0 * p as f64)))
            .collect()
    }

    #[test]
    fn exact_lattice_two_rows() {
        let mut d = lattice(1, 4);
        d.extend(lattice(2, 8));
        let e = estimate_revival_time(&d, &EstimateOptions::default()).unwrap();
        assert!((e.revival / T_REV - 1.0).abs() < 1e-14);
        assert_eq!(e.n_patches_used, 12);
        assert!((e.fundamental * T_CL - 1.0).abs() < 1e-12);
        assert!(e.rows.iter().all(|r| r.accepted));
    }

    #[test]
    fn single_row_with_known_fundamental() {
        let d: Vec<Patch> = [0.25, 0.5, 0.75]
            .iter()
            .map(|&x| det(2, x * T_REV))
            .collect();
        let opts = EstimateOptions {
            fundamental: Some(1.0 / T_CL),
            ..Default::default()
        };
        let e = estimate_revival_time(&d, &opts).unwrap();
        assert!((e.revival - 4.0 * 0.25 * T_REV).abs() / T_REV < 1e-14);
        assert_eq!(e.rows[0].p, 2);
    }

    #[test]
    fn base_search_assigns_rows_three_and_four() {
        let mut d = lattice(3, 6);
        d.extend(lattice(4, 8));
        let e = estimate_revival_time(&d, &EstimateOptions::default()).unwrap();
        let ps: Vec<u32> = e.rows.iter().map(|r| r.p).collect();
        assert!(ps.contains(&3) && ps.contains(&4));
        assert!((e.revival / T_REV - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_patch_and_zero_patch() {
        let mut d = vec![det(2, 0.0)];
        d.extend(
            [1u32, 2, 4, 5]
                .iter()
                .map(|&k| det(2, k as f64 * T_REV / 4.0)),
        );
        let opts = EstimateOptions {
            fundamental: Some(1.0 / T_CL),
            ..Default::default()
        };
        let e = estimate_revival_time(&d, &opts).unwrap();
        assert!((e.revival / T_REV - 1.0).abs() < 1e-12);
        assert_eq!(e.n_patches_used, 4);
    }

    #[test]
    fn outlier_row_is_rejected() {
        let mut d = lattice(1, 4);
        d.extend(lattice(2, 8));
        d.extend((1..=4).map(|k| det(3, k as f64 * 0.2 * T_REV)));
        let e = estimate_revival_time(&d, &EstimateOptions::default()).unwrap();
        assert!((e.revival / T_REV - 1.0).abs() < 1e-12);
        assert_eq!(e.rows.iter().filter(|r| !r.accepted).count(), 1);
    }

    #[test]
    fn impossible_cases() {
        let opts = EstimateOptions::default();
        assert!(matches!(
            estimate_revival_time(&[], &opts),
            Err(Error::EstimationImpossible(_))
        ));
        let one_each = [det(1, T_REV / 2.0), det(2, T_REV / 4.0)];
        assert!(matches!(
            estimate_revival_time(&one_each, &opts),
            Err(Error::EstimationImpossible(_))
        ));
        let off = EstimateOptions {
            fundamental: Some(1.37 / T_CL),
            ..opts
        };
        assert!(matches!(
            estimate_revival_time(&lattice(1, 3), &off),
            Err(Error::EstimationImpossible(_))
        ));
    }

    #[test]
    fn labels_follow_lattice() {
        let mut d = lattice(1, 2);
        d.extend(lattice(3, 6));
        let e = estimate_revival_time(&d, &EstimateOptions::default()).unwrap();
        let l = e.label(&d, 0.06);
        let ks: Vec<(u32, u32)> = l.iter().map(|x| (x.p.unwrap(), x.k.unwrap())).collect();
        assert_eq!(&ks[..3], &[(1, 1), (1, 2), (3, 1)]);
    }
}
