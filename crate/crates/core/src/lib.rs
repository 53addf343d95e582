//! Simulation of single-click quantum repeater chains built from atom-based
//! processors, with an optional SPDC and multimode-memory front end.
//!
//! The crate is layered bottom-up:
//!
//! * [`fock`] evolves truncated Fock-space density operators through beam
//!   splitters, loss and click detection.
//! * [`states`] prepares the SPDC and atom-photon sources.
//! * [`elink`] composes them into heralded elementary links and provides the
//!   closed-form link states for cross-checking.
//! * [`qproc`] distills and merges two-qubit states.
//! * [`rates`] turns links into repetition, key and distribution rates.
//! * [`sweep`] optimizes brightness and sweeps scenarios over distance.
//! * [`validation`] bundles the self-checks run by the command-line tool.
//!
//! Closed forms, distillation and merging are generic over [`Scalar`], so the
//! same code runs in `f64` and exactly over `BigRational`. The Fock engine
//! needs [`Real`].

pub mod elink;
pub mod error;
pub mod fock;
pub mod qproc;
pub mod rates;
pub mod scalar;
pub mod states;
pub mod sweep;
pub mod two_qubit;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Exact rationals for the closed-form link states.
pub type Rational = num_rational::BigRational;
pub type TwoQubitState64 = two_qubit::TwoQubitState<f64>;
pub type TwoQubitState32 = two_qubit::TwoQubitState<f32>;
pub type ExactTwoQubitState = two_qubit::TwoQubitState<Rational>;
pub type DensityOperator64 = fock::DensityOperator<f64>;
pub type ElinkResult64 = elink::ElinkResult<f64>;

/// Entrywise Hermiticity and trace tolerance.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Trace-bound tolerance.
pub const TRACE_TOL: f64 = 1e-12;
/// Allowed negative eigenvalue.
pub const PSD_TOL: f64 = 1e-10;
/// Trace tolerance for normalized two-qubit states.
pub const STATE_TRACE_TOL: f64 = 1e-10;
