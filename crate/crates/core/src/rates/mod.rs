//! Timing, probability and rate model of atom-based and hybrid repeater chains.

mod geometric;
mod key;
mod timing;

pub use geometric::{
    expected_max_geometric_rounds, monte_carlo_max_geometric, p_at_least_two,
    tail_sum_max_geometric,
};
pub use key::{binary_entropy, edr_thresholded, qber, secret_key_rate, KeyRateResult};
pub use timing::{
    arm_transmission, atom_timing, distill_link, hybrid_timing, HardwareParams,
    ProbabilityBreakdown, TimingBreakdown,
};
