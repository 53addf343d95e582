//! Truncated Fock-space engine.
//!
//! States are dense density operators over a [`ModeRegister`] of atomic qubits
//! and bosonic modes. Every channel is a pure function returning a new
//! operator; conditioning returns unnormalized states together with the
//! branch probability.

mod channels;
mod operator;
mod register;

pub use channels::{
    beam_splitter, beam_splitter_unitary, condition_single_click, loss_channel,
    pattern_probabilities, BeamSplitterConvention, ClickPattern, DetectorModel,
    PatternProbabilities,
};
pub use operator::{DensityOperator, LocalOperator};
pub use register::{ModeKind, ModeRegister, ModeSpec, BRIGHT, DARK};

/// Per-mode photon cutoff used by every protocol state.
pub const CUTOFF: usize = 3;
