//! Run configuration, read from a TOML file. Every key is optional and
//! defaults to the circular Rydberg packet analysed over `1.05 T_rev`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cwt::{MorletParams, DEFAULT_OMEGA0, DEFAULT_VOICES_PER_OCTAVE, MIN_OMEGA0};
use crate::error::{Error, Result};
use crate::revival::DEFAULT_REL_THRESHOLD;
use crate::spectral::Taper;
use crate::wavepacket::{EnergyLaw, WavePacketModel, WidthConvention};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub n_mean: u32,
    pub n_span: u32,
    pub sigma: f64,
    pub width: WidthConvention,
    pub energy_law: EnergyLaw,
}

impl Default for ModelSection {
    fn default() -> Self {
        let m = WavePacketModel::rydberg_circular();
        Self {
            n_mean: m.n_mean,
            n_span: m.n_span,
            sigma: m.sigma,
            width: m.width,
            energy_law: m.energy_law,
        }
    }
}

/// Sampling grid. At most one of `n_samples`, `t_max`, `t_max_rev` may be
/// given (default `t_max_rev = 1.05`); `dt` absent means `T_cl / (8 p_max)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub t0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// End time in units of `T_rev`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max_rev: Option<f64>,
    /// Highest harmonic resolved: sets the automatic `dt`, the scale range and
    /// the detector separation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformMethod {
    #[default]
    Fast,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletSection {
    pub omega0: f64,
    pub voices: u32,
    /// Explicit scale range; both or neither.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    /// Translations are every `tau_stride`-th sample.
    pub tau_stride: usize,
    pub method: TransformMethod,
}

impl Default for WaveletSection {
    fn default() -> Self {
        Self {
            omega0: DEFAULT_OMEGA0,
            voices: DEFAULT_VOICES_PER_OCTAVE,
            s_min: None,
            s_max: None,
            tau_stride: 4,
            method: TransformMethod::Fast,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlicesSection {
    /// Harmonic indices `p`, sliced at `s = omega0 T_cl / (2 pi p)`.
    pub harmonics: Vec<u32>,
    /// Explicit scales in atomic units.
    pub scales: Vec<f64>,
}

impl Default for SlicesSection {
    fn default() -> Self {
        Self {
            harmonics: vec![1, 2, 3, 4],
            scales: Vec::new(),
        }
    }
}

/// Optional exponential damping `exp(-t / lifetime)` of the signal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifetime: Option<f64>,
    /// Lifetime in units of `T_rev`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lifetime_rev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub taper: Taper,
    pub max_bands: usize,
    pub rel_threshold: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            taper: Taper::None,
            max_bands: 8,
            rel_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectSection {
    pub rel_threshold: f64,
    /// Absent means three quarters of `T_rev / (2 p_max)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
}

impl Default for DetectSection {
    fn default() -> Self {
        Self {
            rel_threshold: DEFAULT_REL_THRESHOLD,
            min_separation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateSection {
    pub harmonic_tolerance: f64,
    pub outlier_tolerance: f64,
}

impl Default for EstimateSection {
    fn default() -> Self {
        Self {
            harmonic_tolerance: 0.06,
            outlier_tolerance: 0.10,
        }
    }
}

/// Where and how to run; not part of the echoed or hashed configuration
/// because it cannot change any output value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub wavelet: WaveletSection,
    pub slices: SlicesSection,
    pub decay: DecaySection,
    pub spectrum: SpectrumSection,
    pub detect: DetectSection,
    pub estimate: EstimateSection,
    #[serde(skip_serializing)]
    pub output: OutputSection,
}

pub const DEFAULT_P_MAX: u32 = 6;
pub const DEFAULT_T_MAX_REV: f64 = 1.05;

fn config_err(line: Option<usize>, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// 1-based line of the first `key = ...` assignment in `src`.
fn line_of_key(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

impl RunConfig {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(src).map_err(|e| {
            let line = e
                .span()
                .map(|s| src[..s.start.min(src.len())].matches('\n').count() + 1);
            config_err(line, e.message().trim().to_string())
        })?;
        cfg.validate_with_source(src)?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| config_err(None, format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_source("")
    }

    fn validate_with_source(&self, src: &str) -> Result<()> {
        let at = |key: &str, msg: String| config_err(line_of_key(src, key), msg);
        let m = &self.model;
        if let Err(e) = self.model_unchecked().validate() {
            let key = if m.n_mean < 2 {
                "n_mean"
            } else if m.n_span == 0 || m.n_span >= m.n_mean {
                "n_span"
            } else {
                "sigma"
            };
            return Err(at(key, e.to_string()));
        }

        let g = &self.grid;
        let given = [
            g.n_samples.is_some(),
            g.t_max.is_some(),
            g.t_max_rev.is_some(),
        ];
        if given.iter().filter(|&&b| b).count() > 1 {
            let key = ["n_samples", "t_max", "t_max_rev"]
                .into_iter()
                .filter_map(|k| line_of_key(src, k))
                .max();
            return Err(config_err(
                key,
                "give at most one of grid.n_samples, grid.t_max, grid.t_max_rev",
            ));
        }
        if !g.t0.is_finite() {
            return Err(at("t0", "t0 must be finite".into()));
        }
        if let Some(dt) = g.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(at("dt", format!("dt must be positive, got {dt}")));
            }
        }
        if let Some(n) = g.n_samples {
            if n < 2 {
                return Err(at(
                    "n_samples",
                    format!("n_samples must be at least 2, got {n}"),
                ));
            }
        }
        for (key, v) in [("t_max", g.t_max), ("t_max_rev", g.t_max_rev)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(at(key, format!("{key} must be positive, got {v}")));
                }
            }
        }
        if g.p_max == Some(0) {
            return Err(at("p_max", "p_max must be at least 1".into()));
        }

        let w = &self.wavelet;
        if !(w.omega0 >= MIN_OMEGA0) || !w.omega0.is_finite() {
            return Err(at(
                "omega0",
                format!("omega0 must be at least {MIN_OMEGA0}, got {}", w.omega0),
            ));
        }
        if w.voices == 0 {
            return Err(at("voices", "voices must be at least 1".into()));
        }
        if w.tau_stride == 0 {
            return Err(at("tau_stride", "tau_stride must be at least 1".into()));
        }
        match (w.s_min, w.s_max) {
            (None, None) => {}
            (Some(a), Some(b)) if a > 0.0 && b >= a && b.is_finite() => {}
            (Some(_), Some(_)) => {
                return Err(at("s_max", "need 0 < s_min <= s_max".into()));
            }
            _ => {
                return Err(at(
                    if w.s_min.is_some() { "s_min" } else { "s_max" },
                    "give both wavelet.s_min and wavelet.s_max or neither".into(),
                ));
            }
        }

        if self.slices.harmonics.contains(&0) {
            return Err(at("harmonics", "slice harmonics start at 1".into()));
        }
        if self.slices.scales.iter().any(|s| !(*s > 0.0)) {
            return Err(at("scales", "slice scales must be positive".into()));
        }

        let d = &self.decay;
        if d.lifetime.is_some() && d.lifetime_rev.is_some() {
            return Err(at(
                "lifetime_rev",
                "give at most one of decay.lifetime and decay.lifetime_rev".into(),
            ));
        }
        for (key, v) in [("lifetime", d.lifetime), ("lifetime_rev", d.lifetime_rev)] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(at(key, format!("{key} must be positive, got {v}")));
                }
            }
        }

        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !unit(self.spectrum.rel_threshold) {
            return Err(at(
                "rel_threshold",
                "spectrum.rel_threshold must lie in (0, 1)".into(),
            ));
        }
        if self.spectrum.max_bands == 0 {
            return Err(at("max_bands", "max_bands must be at least 1".into()));
        }
        if !unit(self.detect.rel_threshold) {
            return Err(at(
                "rel_threshold",
                "detect.rel_threshold must lie in (0, 1)".into(),
            ));
        }
        if let Some(s) = self.detect.min_separation {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(at(
                    "min_separation",
                    "min_separation must be non-negative".into(),
                ));
            }
        }
        let e = &self.estimate;
        if !(e.harmonic_tolerance > 0.0 && e.harmonic_tolerance < 0.5) {
            return Err(at(
                "harmonic_tolerance",
                "harmonic_tolerance must lie in (0, 0.5)".into(),
            ));
        }
        if !(e.outlier_tolerance > 0.0) {
            return Err(at(
                "outlier_tolerance",
                "outlier_tolerance must be positive".into(),
            ));
        }
        if self.output.threads == Some(0) {
            return Err(at("threads", "threads must be at least 1".into()));
        }
        Ok(())
    }

    fn model_unchecked(&self) -> WavePacketModel {
        let m = &self.model;
        WavePacketModel {
            n_mean: m.n_mean,
            n_span: m.n_span,
            sigma: m.sigma,
            width: m.width,
            energy_law: m.energy_law,
        }
    }

    pub fn model(&self) -> Result<WavePacketModel> {
        let m = self.model_unchecked();
        m.validate()?;
        Ok(m)
    }

    pub fn morlet(&self) -> Result<MorletParams> {
        MorletParams::new(self.wavelet.omega0)
    }

    pub fn p_max(&self) -> u32 {
        self.grid.p_max.unwrap_or(DEFAULT_P_MAX)
    }

    /// Canonical TOML of everything that affects outputs (the `output`
    /// section is left out).
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
