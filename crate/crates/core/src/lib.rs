//! Non-data-aided SNR estimation for QPSK in AWGN.
//!
//! The crate provides three moment-based blind estimators (SVR, a modified
//! SVR built on the difference-form fourth moment, and M2M4), a seeded
//! QPSK/AWGN signal model, and a Monte Carlo harness measuring bias and
//! NMSE over SNR and frame-length grids.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The
//! aliases below fix the scalar for the common cases.
//!
//! ```
//! use nda_snr::{compute_moments, estimate_svr, make_frame, Channel};
//!
//! let channel = Channel::unit_power(10.0, 42).unwrap();
//! let frame = make_frame(&channel, 4096, 0).unwrap();
//! let rho = estimate_svr(&compute_moments(&frame)).rho_db().unwrap();
//! assert!((rho - 10.0).abs() < 1.0);
//! ```

pub mod analytic;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod scalar;
pub mod sigmodel;

pub use error::{Error, Result};
pub use estimators::{
    beta_modified, beta_svr, compute_moments, estimate, estimate_m2m4, estimate_modified_svr, estimate_svr,
    modified_roots, Branch, EstimatorKind, EstimatorResult, MomentSet, Status, ThresholdMode, ThresholdPolicy,
};
pub use montecarlo::{
    aggregate, run_cell, run_cell_observed, run_m4_curve, run_sweep, Aggregation, M4CurveRecord, SweepConfig,
    SweepRecord,
};
pub use scalar::{from_db, to_db, Real};
pub use sigmodel::{
    apply_awgn, derive_seed, generate_qpsk_symbols, make_frame, trial_rng, ChannelSpec, ComplexSample, SignalFrame,
};

pub type Sample = ComplexSample<f64>;
pub type Channel = ChannelSpec<f64>;
pub type Frame = SignalFrame<f64>;
pub type Moments = MomentSet<f64>;
pub type Estimate = EstimatorResult<f64>;
pub type Policy = ThresholdPolicy<f64>;

pub type Sample32 = ComplexSample<f32>;
pub type Channel32 = ChannelSpec<f32>;
pub type Frame32 = SignalFrame<f32>;
pub type Moments32 = MomentSet<f32>;
pub type Estimate32 = EstimatorResult<f32>;
pub type Policy32 = ThresholdPolicy<f32>;
