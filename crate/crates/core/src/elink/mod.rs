//! Elementary links: Fock-space pipelines for the hybrid and atom-based
//! architectures, their closed forms, and the error-suppression strategies.

mod analytic;
mod pipeline;
mod strategy;

pub use analytic::{analytic_epl, analytic_pnr, analytic_pnr_epl, analytic_raw, analytic_re};
pub use pipeline::{
    atom_elink, heralded_qm_pair, hybrid_raw_elink, load_heralded_pair, loading_swap, re_trick,
    ElinkResult, LossParams, SwapConfig,
};
pub use strategy::{Strategy, StrategyOutcome};

/// `<Psi+|rho|Psi+>`.
pub fn fidelity_psi_plus<S: crate::Scalar>(state: &crate::two_qubit::TwoQubitState<S>) -> S {
    state.fidelity_psi_plus()
}
