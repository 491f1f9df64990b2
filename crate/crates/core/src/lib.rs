//! Hybrid analog/lattice-coded transmission of Gaussian sources over the
//! two-user degraded Gaussian broadcast channel.
//!
//! * [`model`]: source, channel and power-split types and the derived
//!   transceiver constants.
//! * [`regions`]: closed-form distortion frontiers for the outer bound, the
//!   hybrid schemes, uncoded transmission and two separation baselines.
//! * [`lattice`]: dithered modulo arithmetic on `s Z^n`.
//! * [`simulate`]: Monte Carlo runs of the actual transceivers.
//! * [`cli`]: the `hbcast` command-line frontend.

pub mod cli;
pub mod lattice;
pub mod model;
pub mod regions;
pub mod simulate;

pub use lattice::{Dither, Lattice, LatticeError};
pub use model::{
    derive_scheme_params, effective_noise_variance, ChannelSpec, DistortionPair, ModelError,
    PowerSplit, SchemeParams, SourceSpec,
};
pub use regions::{ComparisonReport, RegionCurve, RegionError, Scheme};
pub use simulate::{LatticeMode, SimConfig, SimError, SimMode, SimResult};
