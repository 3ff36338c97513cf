//! Fractional-revival patches in the time-frequency plane.
//!
//! A revival of order `p` shows up as a scalogram patch at frequency
//! `p / T_cl` and translations `k T_rev / (2p)`. This module predicts that
//! lattice, evaluates the closed-form transform of the model signal, finds
//! patches in a numerical scalogram and recovers `T_rev` from their spacing.

mod analytic;
mod detect;
mod estimate;

pub use analytic::{
    analytic_cwt, analytic_cwt_levels, coherence_residual, patch_constraint_scale,
    predicted_patch_grid,
};
pub use detect::{detect_patches, DetectOptions, DEFAULT_REL_THRESHOLD};
pub use estimate::{estimate_revival_time, EstimateOptions, RevivalEstimate, RowEstimate};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchSource {
    Predicted,
    Detected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    /// Harmonic (row) index; `None` for raw detections.
    pub p: Option<u32>,
    /// Revival index along the row; `None` for raw detections.
    pub k: Option<u32>,
    pub tau: f64,
    pub frequency: f64,
    pub scale: f64,
    pub energy: f64,
    pub source: PatchSource,
}
