//! Simulation and analysis of the KMB09 quantum key distribution
//! protocol and its three-basis variant under intercept-resend
//! eavesdropping.
//!
//! The crate provides four layers:
//!
//! - [`qstate`]: two-dimensional complex states, angle-parametrized
//!   measurement bases, overlap probabilities, and Born-rule sampling;
//! - [`rates_kmb09`] / [`rates_variant`]: the closed-form index
//!   transmission error rate (ITER), quantum bit error rate (QBER), and
//!   key-bit efficiencies of both protocols;
//! - [`protocol`]: an event-level Monte Carlo simulation of full
//!   sessions (preparation, interception, noise, measurement, sifting,
//!   and rate estimation from revealed test samples) with
//!   worker-partitionable counter-based randomness;
//! - [`sweep`]: grid sweeps over the eavesdropper's basis, extrema
//!   location, and the ITER-vs-QBER signature fit that separates
//!   eavesdropping errors from system errors.
//!
//! All angles are radians; command line front ends convert from
//! degrees. The crate is `no_std`-compatible (with `alloc`) when built
//! without the default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod error;
pub mod protocol;
pub mod qstate;
pub mod rates_kmb09;
pub mod rates_variant;
pub mod sweep;

pub use error::Error;
pub use protocol::{
    run_session, run_session_traced, EveStrategy, NoiseSpec, ProtocolKind, ProtocolSpec,
    SessionConfig, SessionEngine, SessionStats, SessionTally,
};
pub use qstate::{
    basis_from_angles, born_sample, overlap_prob, BasisLabel, MeasurementBasis, PureState,
    StateIndex,
};
pub use rates_kmb09::{
    kmb09_eta, kmb09_eta_evan, kmb09_iter, kmb09_qber, kmb09_rates, Kmb09Params, RateQuartet,
};
pub use rates_variant::{
    variant_eta, variant_eta_evan, variant_iter, variant_qb, variant_qber, variant_rates,
    VariantParams, VariantRates,
};
pub use sweep::{
    classify_deviation, fit_signature, signature_deviation, sweep_eve, SignatureFit, SweepRecord,
    Verdict, SIGNATURE_THRESHOLD,
};
