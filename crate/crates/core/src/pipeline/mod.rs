//! Configuration-driven runs: synthesis, spectrum, scalogram, slices,
//! detection and estimation, each written as a plot-ready text artifact.

mod config;
mod output;
mod run;

pub use config::{
    DecaySection, DetectSection, EstimateSection, GridSection, ModelSection, OutputSection,
    RunConfig, SlicesSection, SpectrumSection, TransformMethod, WaveletSection, DEFAULT_P_MAX,
    DEFAULT_T_MAX_REV,
};
pub use output::{fmt_f, parse_echo, Provenance, DISPLAY_SCALES, ECHO_PREFIX};
pub use run::{
    analyse, detect_options, estimate_options, resolve_output_dir, run_stage, simulate, slices,
    spectrum, transform, Analysis, Overrides, ResolvedRun, Stage, FALLBACK_OUTPUT_DIR,
    OUTPUT_DIR_ENV,
};
