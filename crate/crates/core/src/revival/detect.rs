use super::{Patch, PatchSource};
use crate::cwt::{frequency_for_scale, ScalogramGrid};
use crate::error::{domain, Result};
use crate::wavepacket::TimeScales;

pub const DEFAULT_REL_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    /// Maxima below this fraction of the strongest maximum in their scale row are dropped.
    pub rel_threshold: f64,
    /// Two detections in one row closer than this keep only the stronger.
    pub min_separation: f64,
}

impl DetectOptions {
    /// Default separation is three quarters of the finest lattice spacing
    /// `T_rev / (2 p_max)`, so neighbouring patches of row `p_max` stay apart.
    pub fn for_time_scales(ts: &TimeScales, p_max: u32) -> Self {
        Self {
            rel_threshold: DEFAULT_REL_THRESHOLD,
            min_separation: 0.75 * ts.lattice_spacing(p_max.max(1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_threshold > 0.0 && self.rel_threshold < 1.0) {
            return Err(domain(format!(
                "relative threshold must lie in (0, 1), got {}",
                self.rel_threshold
            )));
        }
        if !(self.min_separation >= 0.0) || !self.min_separation.is_finite() {
            return Err(domain(format!(
                "minimum separation must be finite and non-negative, got {}",
                self.min_separation
            )));
        }
        Ok(())
    }
}

/// Local maxima of the scalogram energy outside the cone of influence.
///
/// A cell qualifies when it and both translation neighbours lie outside the
/// cone, it is not on the first or last scale row, its energy is positive and
/// no 3x3 neighbour exceeds it. Per scale row, candidates under
/// `rel_threshold` times the row's strongest candidate are dropped, then a
/// greedy pass by descending energy enforces `min_separation`.
///
/// Detections carry no `(p, k)` labels; results are sorted by scale, then tau.
pub fn detect_patches(grid: &ScalogramGrid, opts: &DetectOptions) -> Result<Vec<Patch>> {
    opts.validate()?;
    let (ns, nt) = (grid.scales().len(), grid.taus().len());
    if ns < 3 || nt < 3 {
        return Ok(Vec::new());
    }
    let e = grid.energy();
    let params = grid.params();
    let mut out = Vec::new();

    for si in 1..ns - 1 {
        let mut cands: Vec<(usize, f64)> = Vec::new();
        for ti in 1..nt - 1 {
            let v = e[si][ti];
            if !(v > 0.0) || (ti - 1..=ti + 1).any(|j| grid.in_cone(si, j)) {
                continue;
            }
            let is_max = (si - 1..=si + 1)
                .all(|a| (ti - 1..=ti + 1).all(|b| (a == si && b == ti) || e[a][b] <= v));
            if is_max {
                cands.push((ti, v));
            }
        }
        let Some(top) = cands.iter().map(|c| c.1).reduce(f64::max) else {
            continue;
        };
        cands.retain(|c| c.1 >= opts.rel_threshold * top);
        cands.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let mut kept: Vec<(usize, f64)> = Vec::new();
        for c in cands {
            let tau = grid.taus()[c.0];
            if kept
                .iter()
                .all(|k| (grid.taus()[k.0] - tau).abs() >= opts.min_separation)
            {
                kept.push(c);
            }
        }
        kept.sort_by_key(|c| c.0);

        let scale = grid.scales()[si];
        let frequency = frequency_for_scale(scale, &params)?;
        out.extend(kept.into_iter().map(|(ti, v)| Patch {
            p: None,
            k: None,
            tau: grid.taus()[ti],
            frequency,
            scale,
            energy: v,
            source: PatchSource::Detected,
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwt::MorletParams;

    fn grid_with(energy: Vec<Vec<f64>>, taus: Vec<f64>, scales: Vec<f64>) -> ScalogramGrid {
        let end = *taus.last().unwrap();
        ScalogramGrid::from_energy(taus, scales, energy, &MorletParams::default(), 0.0, end)
            .unwrap()
    }

    #[test]
    fn zero_grid_has_no_detections() {
        let taus: Vec<f64> = (0..200).map(f64::from).collect();
        let g = grid_with(vec![vec![0.0; 200]; 5], taus, vec![1.0, 1.2, 1.4, 1.6, 1.8]);
        let opts = DetectOptions {
            rel_threshold: 0.3,
            min_separation: 5.0,
        };
        assert!(detect_patches(&g, &opts).unwrap().is_empty());
    }

    #[test]
    fn single_peak_and_threshold() {
        let taus: Vec<f64> = (0..200).map(f64::from).collect();
        let scales = vec![1.0, 1.2, 1.4, 1.6, 1.8];
        let bump = |t: f64, c: f64, a: f64| a * (-(t - c).powi(2) / 8.0).exp();
        let energy = scales
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let w = if i == 2 { 1.0 } else { 0.5 };
                taus.iter()
                    .map(|&t| w * (bump(t, 60.0, 1.0) + bump(t, 140.0, 0.2)))
                    .collect()
            })
            .collect();
        let g = grid_with(energy, taus, scales);
        let strict = DetectOptions {
            rel_threshold: 0.3,
            min_separation: 5.0,
        };
        let d = detect_patches(&g, &strict).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].tau, d[0].scale), (60.0, 1.4));
        let loose = DetectOptions {
            rel_threshold: 0.1,
            ..strict
        };
        assert_eq!(detect_patches(&g, &loose).unwrap().len(), 2);
        let wide = DetectOptions {
            rel_threshold: 0.1,
            min_separation: 100.0,
        };
        assert_eq!(detect_patches(&g, &wide).unwrap().len(), 1);
    }

    #[test]
    fn maxima_in_cone_are_ignored() {
        let taus: Vec<f64> = (0..100).map(f64::from).collect();
        let scales = vec![1.0, 2.0, 3.0];
        let energy: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                taus.iter()
                    .map(|&t| {
                        if i == 1 {
                            (-(t - 5.0).powi(2)).exp()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let g = grid_with(energy, taus, scales);
        let opts = DetectOptions {
            rel_threshold: 0.3,
            min_separation: 1.0,
        };
        assert!(detect_patches(&g, &opts).unwrap().is_empty());
    }

    #[test]
    fn option_validation() {
        assert!(DetectOptions {
            rel_threshold: 0.0,
            min_separation: 1.0
        }
        .validate()
        .is_err());
        assert!(DetectOptions {
            rel_threshold: 0.5,
            min_separation: -1.0
        }
        .validate()
        .is_err());
        let ts = crate::wavepacket::time_scales(320).unwrap();
        let d = DetectOptions::for_time_scales(&ts, 6);
        assert!((d.min_separation - ts.revival / 16.0).abs() < 1.0);
    }
}
