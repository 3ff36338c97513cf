//! Time-frequency analysis of wave-packet revivals.
//!
//! A coherent superposition of bound states with a Gaussian weight
//! distribution recurs at the classical period `T_cl`, then dephases and
//! rephases at fractions of the revival time `T_rev`. The autocorrelation
//! power of such a packet is analysed here with a Morlet continuous wavelet
//! transform: fractional revivals of order `p` appear as energy patches at
//! frequency `p / T_cl` spaced `T_rev / (2p)` apart in translation, and
//! `T_rev` can be read back from a detected patch lattice even when the
//! signal decays long before a full revival.
//!
//! Atomic units (`hbar = 1`) are used throughout.
//!
//! ```
//! use revival_cwt::wavepacket::WavePacketModel;
//!
//! let model = WavePacketModel::rydberg_circular();
//! let ts = model.time_scales().unwrap();
//! assert!((ts.classical / 2.0589e8 - 1.0).abs() < 1e-4);
//! assert!((ts.revival / 4.3923e10 - 1.0).abs() < 1e-4);
//! ```

// NaN must fail validation checks, so `!(x > 0.0)` is intentional
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cwt;
pub mod error;
pub mod pipeline;
pub mod revival;
pub mod series;
pub mod spectral;
pub mod wavepacket;

pub use error::{Error, Result};
pub use series::TimeSeries;
