//! Spectral-efficiency analysis of a device-to-device underlay in a
//! multi-antenna cellular downlink.
//!
//! Device pairs at a fixed separation reuse the downlink spectrum;
//! transmitters beamform towards their own receiver, and their locations
//! form a Poisson field. The crate provides, over a shared
//! pathloss/shadowing model:
//!
//! - [`analytic`]: closed-form expressions: the achievable D2D area
//!   spectral efficiency and its interference-limited ceiling, the
//!   required transmit SNR at a fixed ASE target, and the cellular
//!   per-user SE under D2D interference with its dense-network limit.
//! - [`montecarlo`]: seeded, worker-count-independent estimators of the
//!   exact ergodic quantities the closed forms bound, plus a power
//!   calibrator that hits an ASE target on the realized (not bounded)
//!   rate.
//! - [`experiments`]: sweep tables pairing analytic curves with Monte
//!   Carlo estimates, emitted as CSV or JSON.
//!
//! Everything internal is strict SI (m, m⁻², W, bits/s/Hz/m²); [`units`]
//! holds the dBm/dB/km² boundary conversions.

// Domain guards are written `!(x > 0.0)` so NaN fails them too; test
// constants carry full f64 round-trip digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod units;

pub use analytic::{
    ase_bounds, ase_limit, ase_lower_bound, cue_se_at_target_ase, cue_se_bound, cue_se_dense_limit,
    interference_fraction, interference_free_sinr, mean_interference_w, min_feasible_density,
    required_tx_snr, AseBoundResult, CueSeResult,
};
pub use error::{Error, Result};
pub use experiments::{
    emit, run_ase_sweep, run_lambda_sweep, EmitFormat, McPowerSource, SweepKind, SweepRow,
    SweepSpec,
};
pub use model::{sample_link_gain, DerivedConstants, OperatingPoint, SystemParams, SPEED_OF_LIGHT};
pub use montecarlo::{
    mc_cue_se, mc_d2d_ase, mc_mean_interference, mc_required_tx_snr, sample_cross_fading,
    sample_signal_fading, truncation_radius, McConfig, McEstimate, SamplerMode,
};
