use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::config::{RunConfig, TransformMethod, DEFAULT_T_MAX_REV};
use super::output::{fmt_f, write_file, Provenance};
use crate::cwt::{
    cwt_direct, cwt_fast, harmonic_scale_range, log_scales, scale_for_frequency, scale_slice,
    tau_subgrid, MorletParams, ScaleSlice, ScalogramGrid, CONE_OF_INFLUENCE,
};
use crate::error::{Error, Result};
use crate::revival::{
    detect_patches, estimate_revival_time, predicted_patch_grid, DetectOptions, EstimateOptions,
    Patch, PatchSource, RevivalEstimate,
};
use crate::series::TimeSeries;
use crate::spectral::{band_centers, power_spectrum, BandPeak, SpectralDensity};
use crate::wavepacket::{apply_decay, default_time_step, TimeScales, WavePacketModel};

/// Environment variable naming the output directory used when neither the
/// command line nor the config gives one.
pub const OUTPUT_DIR_ENV: &str = "REVIVAL_CWT_OUT";
pub const FALLBACK_OUTPUT_DIR: &str = "revival-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Simulate,
    Spectrum,
    Scalogram,
    Slices,
    Detect,
    Estimate,
    All,
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simulate" => Stage::Simulate,
            "spectrum" => Stage::Spectrum,
            "scalogram" => Stage::Scalogram,
            "slices" => Stage::Slices,
            "detect" => Stage::Detect,
            "estimate" => Stage::Estimate,
            "all" => Stage::All,
            _ => {
                return Err(Error::Config {
                    line: None,
                    message: format!("unknown subcommand {s:?}"),
                })
            }
        })
    }
}

/// Command-line overrides, applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub omega0: Option<f64>,
    /// Absolute lifetime in atomic units; replaces any lifetime in the file.
    pub lifetime: Option<f64>,
    pub p_max: Option<u32>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(w) = self.omega0 {
            cfg.wavelet.omega0 = w;
        }
        if let Some(l) = self.lifetime {
            cfg.decay.lifetime = Some(l);
            cfg.decay.lifetime_rev = None;
        }
        if let Some(p) = self.p_max {
            cfg.grid.p_max = Some(p);
        }
        if let Some(t) = self.threads {
            cfg.output.threads = Some(t);
        }
        cfg.validate()
    }
}

/// Command line first, then the config file, then [`OUTPUT_DIR_ENV`].
pub fn resolve_output_dir(cli: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
}

/// Configuration with every automatic value filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub model: WavePacketModel,
    pub time_scales: TimeScales,
    pub params: MorletParams,
    pub p_max: u32,
    pub t0: f64,
    pub dt: f64,
    pub n_samples: usize,
    pub lifetime: Option<f64>,
    pub scales: Vec<f64>,
    pub tau_stride: usize,
}

fn config_err(message: String) -> Error {
    Error::Config {
        line: None,
        message,
    }
}

impl RunConfig {
    pub fn resolve(&self) -> Result<ResolvedRun> {
        self.validate()?;
        let model = self.model()?;
        let ts = model.time_scales()?;
        let params = self.morlet()?;
        let p_max = self.p_max();
        let g = &self.grid;
        let dt = g.dt.unwrap_or_else(|| default_time_step(&ts, p_max));
        let n_samples = match (g.n_samples, g.t_max) {
            (Some(n), _) => n,
            (None, Some(t)) => span_samples(t - g.t0, dt)?,
            (None, None) => span_samples(
                g.t_max_rev.unwrap_or(DEFAULT_T_MAX_REV) * ts.revival - g.t0,
                dt,
            )?,
        };
        let lifetime = self
            .decay
            .lifetime
            .or(self.decay.lifetime_rev.map(|l| l * ts.revival));

        let scales = match (self.wavelet.s_min, self.wavelet.s_max) {
            (Some(a), Some(b)) => log_scales(a, b, self.wavelet.voices)?,
            _ => {
                let (a, b) = harmonic_scale_range(&ts, p_max, &params)?;
                log_scales(a, b, self.wavelet.voices)?
            }
        };
        let (lo, hi) = (scales[0], scales[scales.len() - 1]);
        for &p in &self.slices.harmonics {
            let s = scale_for_frequency(ts.harmonic_frequency(p), &params)?;
            if s < lo || s > hi {
                return Err(config_err(format!(
                    "slice harmonic {p} (scale {s:e}) lies outside the scale grid [{lo:e}, {hi:e}]"
                )));
            }
        }
        for &s in &self.slices.scales {
            if s < lo || s > hi {
                return Err(config_err(format!(
                    "slice scale {s:e} lies outside the scale grid [{lo:e}, {hi:e}]"
                )));
            }
        }
        Ok(ResolvedRun {
            model,
            time_scales: ts,
            params,
            p_max,
            t0: g.t0,
            dt,
            n_samples,
            lifetime,
            scales,
            tau_stride: self.wavelet.tau_stride,
        })
    }
}

fn span_samples(span: f64, dt: f64) -> Result<usize> {
    let n = (span / dt + 1e-9).floor();
    if !(n >= 1.0) {
        return Err(config_err(format!(
            "time span {span:e} holds fewer than 2 samples at dt = {dt:e}"
        )));
    }
    Ok(n as usize + 1)
}

/// Autocorrelation power on the configured grid, damped when a lifetime is set.
pub fn simulate(run: &ResolvedRun) -> Result<TimeSeries> {
    let s = run
        .model
        .autocorrelation_power(run.t0, run.dt, run.n_samples)?;
    match run.lifetime {
        Some(l) => apply_decay(&s, l),
        None => Ok(s),
    }
}

pub fn spectrum(cfg: &RunConfig, signal: &TimeSeries) -> Result<(SpectralDensity, Vec<BandPeak>)> {
    let sp = power_spectrum(signal, cfg.spectrum.taper)?;
    let bands = band_centers(&sp, cfg.spectrum.max_bands, cfg.spectrum.rel_threshold)?;
    Ok((sp, bands))
}

pub fn transform(cfg: &RunConfig, run: &ResolvedRun, signal: &TimeSeries) -> Result<ScalogramGrid> {
    let taus = tau_subgrid(signal, run.tau_stride);
    match cfg.wavelet.method {
        TransformMethod::Fast => cwt_fast(signal, &run.scales, &taus, &run.params),
        TransformMethod::Direct => cwt_direct(signal, &run.scales, &taus, &run.params),
    }
}

/// Slices named `p<k>` for harmonics and `s<i>` for explicit scales.
pub fn slices(
    cfg: &RunConfig,
    run: &ResolvedRun,
    grid: &ScalogramGrid,
) -> Result<Vec<(String, ScaleSlice)>> {
    let mut out = Vec::new();
    for &p in &cfg.slices.harmonics {
        let s = scale_for_frequency(run.time_scales.harmonic_frequency(p), &run.params)?;
        out.push((format!("p{p}"), scale_slice(grid, s)?));
    }
    for (i, &s) in cfg.slices.scales.iter().enumerate() {
        out.push((format!("s{i}"), scale_slice(grid, s)?));
    }
    Ok(out)
}

pub fn detect_options(cfg: &RunConfig, run: &ResolvedRun) -> DetectOptions {
    let mut o = DetectOptions::for_time_scales(&run.time_scales, run.p_max);
    o.rel_threshold = cfg.detect.rel_threshold;
    if let Some(s) = cfg.detect.min_separation {
        o.min_separation = s;
    }
    o
}

/// The fundamental is left for the estimator to infer from row ratios; `T_cl`
/// of the model is not used, so the estimate is a genuine measurement.
pub fn estimate_options(
    cfg: &RunConfig,
    run: &ResolvedRun,
    grid: &ScalogramGrid,
) -> EstimateOptions {
    let taus = grid.taus();
    EstimateOptions {
        fundamental: None,
        p_max: run.p_max,
        harmonic_tolerance: cfg.estimate.harmonic_tolerance,
        tau_resolution: if taus.len() > 1 {
            taus[1] - taus[0]
        } else {
            0.0
        },
        outlier_tolerance: cfg.estimate.outlier_tolerance,
    }
}

/// In-memory results of a run, for callers that want them without files.
#[derive(Debug)]
pub struct Analysis {
    pub run: ResolvedRun,
    pub signal: TimeSeries,
    pub spectrum: SpectralDensity,
    pub bands: Vec<BandPeak>,
    pub grid: ScalogramGrid,
    pub detections: Vec<Patch>,
    pub estimate: Result<RevivalEstimate>,
}

pub fn analyse(cfg: &RunConfig) -> Result<Analysis> {
    with_threads(cfg, || {
        let run = cfg.resolve()?;
        let signal = simulate(&run)?;
        let (spectrum, bands) = spectrum(cfg, &signal)?;
        let grid = transform(cfg, &run, &signal)?;
        let detections = detect_patches(&grid, &detect_options(cfg, &run))?;
        let estimate = estimate_revival_time(&detections, &estimate_options(cfg, &run, &grid));
        Ok(Analysis {
            run,
            signal,
            spectrum,
            bands,
            grid,
            detections,
            estimate,
        })
    })
}

fn with_threads<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match cfg.output.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| config_err(format!("cannot start {n} threads: {e}")))?
            .install(f),
        None => f(),
    }
}

/// Runs one stage (and whatever it depends on) and writes its artifacts into
/// `out_dir`. Returns the files written. For `estimate` and `all`, an
/// impossible estimate is reported after the other artifacts are written.
pub fn run_stage(stage: Stage, cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    with_threads(cfg, || run_inner(stage, cfg, out_dir))
}

fn run_inner(stage: Stage, cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let run = cfg.resolve()?;
    let prov = Provenance::new(cfg);
    let mut files = Vec::new();
    let wants = |s: Stage| stage == s || stage == Stage::All;

    let signal = simulate(&run)?;
    if wants(Stage::Simulate) {
        files.push(write_file(
            out_dir,
            "timeseries.csv",
            &timeseries_csv(&prov, &run, &signal),
        )?);
    }
    if wants(Stage::Spectrum) {
        let (sp, bands) = spectrum(cfg, &signal)?;
        files.push(write_file(
            out_dir,
            "spectrum.csv",
            &spectrum_csv(&prov, &sp),
        )?);
        files.push(write_file(
            out_dir,
            "bands.csv",
            &bands_csv(&prov, &run, &bands),
        )?);
    }
    if matches!(stage, Stage::Simulate | Stage::Spectrum) {
        return Ok(files);
    }

    let grid = transform(cfg, &run, &signal)?;
    if wants(Stage::Scalogram) {
        files.push(write_file(
            out_dir,
            "scalogram.csv",
            &scalogram_csv(&prov, &grid),
        )?);
        files.push(write_file(
            out_dir,
            "scalogram.meta",
            &scalogram_meta(&prov, cfg, &grid),
        )?);
    }
    if wants(Stage::Slices) {
        for (name, sl) in slices(cfg, &run, &grid)? {
            files.push(write_file(
                out_dir,
                &format!("slice_{name}.csv"),
                &slice_csv(&prov, &name, &sl),
            )?);
        }
    }
    if !(wants(Stage::Detect) || wants(Stage::Estimate)) {
        return Ok(files);
    }

    let detections = detect_patches(&grid, &detect_options(cfg, &run))?;
    let predicted = predicted_patch_grid(&run.time_scales, run.p_max, signal.end(), &run.params)?;
    let estimate = if wants(Stage::Estimate) {
        Some(estimate_revival_time(
            &detections,
            &estimate_options(cfg, &run, &grid),
        ))
    } else {
        None
    };
    let labelled = match &estimate {
        Some(Ok(e)) => e.label(&detections, cfg.estimate.harmonic_tolerance),
        _ => detections.clone(),
    };
    files.push(write_file(
        out_dir,
        "patches.csv",
        &patches_csv(&prov, &predicted, &labelled),
    )?);

    if let Some(est) = estimate {
        files.push(write_file(
            out_dir,
            "estimate.txt",
            &estimate_txt(&prov, &run, &est),
        )?);
        est?;
    }
    Ok(files)
}

fn timeseries_csv(prov: &Provenance, run: &ResolvedRun, s: &TimeSeries) -> String {
    let mut out = prov.header(
        "timeseries",
        &[
            ("n_samples", s.len().to_string()),
            ("dt", fmt_f(s.dt())),
            ("t_classical", fmt_f(run.time_scales.classical)),
            ("t_revival", fmt_f(run.time_scales.revival)),
        ],
    );
    out.push_str("t,value\n");
    for (i, v) in s.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f(s.time(i)), fmt_f(*v));
    }
    out
}

fn spectrum_csv(prov: &Provenance, sp: &SpectralDensity) -> String {
    let mut out = prov.header(
        "spectrum",
        &[
            ("df", fmt_f(sp.df)),
            ("transform_len", sp.transform_len.to_string()),
        ],
    );
    out.push_str("frequency,power\n");
    for (k, p) in sp.power.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f(sp.frequency(k)), fmt_f(*p));
    }
    out
}

fn bands_csv(prov: &Provenance, run: &ResolvedRun, bands: &[BandPeak]) -> String {
    let mut out = prov.header(
        "bands",
        &[("t_classical", fmt_f(run.time_scales.classical))],
    );
    out.push_str("frequency,power,harmonic_index\n");
    for b in bands {
        let p = b.harmonic_index.map_or("-".to_string(), |p| p.to_string());
        let _ = writeln!(out, "{},{},{p}", fmt_f(b.frequency), fmt_f(b.power));
    }
    out
}

fn scalogram_csv(prov: &Provenance, grid: &ScalogramGrid) -> String {
    let mut out = prov.header(
        "scalogram",
        &[
            ("n_scales", grid.scales().len().to_string()),
            ("n_taus", grid.taus().len().to_string()),
        ],
    );
    out.push_str("tau,scale,energy\n");
    for (s, row) in grid.scales().iter().zip(grid.energy()) {
        let s = fmt_f(*s);
        for (t, e) in grid.taus().iter().zip(row) {
            let _ = writeln!(out, "{},{s},{}", fmt_f(*t), fmt_f(*e));
        }
    }
    out
}

fn scalogram_meta(prov: &Provenance, cfg: &RunConfig, grid: &ScalogramGrid) -> String {
    let (start, end) = grid.signal_span();
    let method = match cfg.wavelet.method {
        TransformMethod::Fast => "fast",
        TransformMethod::Direct => "direct",
    };
    let mut out = prov.header(
        "scalogram-meta",
        &[
            ("n_scales", grid.scales().len().to_string()),
            ("n_taus", grid.taus().len().to_string()),
            ("omega0", fmt_f(grid.omega0())),
            ("method", method.to_string()),
            ("cone_of_influence_factor", fmt_f(CONE_OF_INFLUENCE)),
            ("signal_start", fmt_f(start)),
            ("signal_end", fmt_f(end)),
        ],
    );
    out.push_str("scale_index,scale,frequency,coi_tau_lo,coi_tau_hi\n");
    let params = grid.params();
    for (i, &s) in grid.scales().iter().enumerate() {
        let (lo, hi) = grid.valid_tau_range(i);
        let f = crate::cwt::frequency_for_scale(s, &params).unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{i},{},{},{},{}",
            fmt_f(s),
            fmt_f(f),
            fmt_f(lo),
            fmt_f(hi)
        );
    }
    out
}

fn slice_csv(prov: &Provenance, name: &str, sl: &ScaleSlice) -> String {
    let mut out = prov.header(
        "slice",
        &[
            ("slice", name.to_string()),
            ("requested_scale", fmt_f(sl.requested_scale)),
            ("scale", fmt_f(sl.scale)),
            ("scale_index", sl.scale_index.to_string()),
        ],
    );
    out.push_str("t,value\n");
    for (i, v) in sl.series.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f(sl.series.time(i)), fmt_f(*v));
    }
    out
}

fn patches_csv(prov: &Provenance, predicted: &[Patch], detected: &[Patch]) -> String {
    let mut out = prov.header(
        "patches",
        &[
            ("n_predicted", predicted.len().to_string()),
            ("n_detected", detected.len().to_string()),
        ],
    );
    out.push_str("p,k,tau,frequency,scale,energy,source\n");
    let opt = |x: Option<u32>| x.map_or("-".to_string(), |v| v.to_string());
    for p in predicted.iter().chain(detected) {
        let src = match p.source {
            PatchSource::Predicted => "predicted",
            PatchSource::Detected => "detected",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{src}",
            opt(p.p),
            opt(p.k),
            fmt_f(p.tau),
            fmt_f(p.frequency),
            fmt_f(p.scale),
            fmt_f(p.energy)
        );
    }
    out
}

fn estimate_txt(prov: &Provenance, run: &ResolvedRun, est: &Result<RevivalEstimate>) -> String {
    let t_model = run.time_scales.revival;
    let e = match est {
        Err(err) => {
            let mut out = prov.header("estimate", &[("status", "impossible".into())]);
            let _ = writeln!(out, "# reason = {err}");
            return out;
        }
        Ok(e) => e,
    };
    let mut out = prov.header(
        "estimate",
        &[
            ("status", "ok".into()),
            ("t_rev_hat", fmt_f(e.revival)),
            ("std_error", fmt_f(e.std_error)),
            ("t_rev_model", fmt_f(t_model)),
            ("relative_error", fmt_f(e.revival / t_model - 1.0)),
            ("fundamental", fmt_f(e.fundamental)),
            ("n_patches_used", e.n_patches_used.to_string()),
            ("residual_rms", fmt_f(e.residual_rms)),
        ],
    );
    out.push_str("p,scale,frequency,n_patches,spacing,t_rev,std_error,accepted\n");
    for r in &e.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.p,
            fmt_f(r.scale),
            fmt_f(r.frequency),
            r.taus.len(),
            fmt_f(r.spacing),
            fmt_f(r.revival),
            fmt_f(r.std_error),
            r.accepted
        );
    }
    out
}
