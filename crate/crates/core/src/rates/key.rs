use serde::Serialize;

use crate::scalar::{half, lit, Real, Scalar};
use crate::two_qubit::{TwoQubitState, BB, BD, DB, DD};

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy<T: Real>(p: T) -> T {
    let term = |x: T| {
        if x <= T::zero() {
            T::zero()
        } else {
            -x * x.log2()
        }
    };
    term(p) + term(T::one() - p)
}

/// Bit- and phase-error rates against `|Psi+>`.
///
/// `|Psi+>` anticorrelates `Z` outcomes, so `p_bit` is the `BB + DD` weight; it
/// correlates `X` outcomes, so `p_phase` is the weight on `|+->` and `|-+>`,
/// `(1 - 2 Re(rho_03 + rho_12)) / 2`.
pub fn qber<S: Scalar>(state: &TwoQubitState<S>) -> (S, S) {
    let p_bit = state.population(BB) + state.population(DD);
    let coh = state.get(BB, DD).re.clone() + state.get(BD, DB).re.clone();
    let p_phase = (state.trace() - lit::<S>(2) * coh) * half();
    (p_bit, p_phase)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRateResult {
    /// End-to-end repetition rate, per second.
    pub r_rep: f64,
    pub p_bit: f64,
    pub p_phase: f64,
    /// Secret fraction before clipping.
    pub r_sec: f64,
    /// `r_rep * max(r_sec, 0)`, per second.
    pub r_key: f64,
    pub fidelity: f64,
}

/// Asymptotic entanglement-based BB84 key rate.
pub fn secret_key_rate(r_rep: f64, state: &TwoQubitState<f64>) -> KeyRateResult {
    let (p_bit, p_phase) = qber(state);
    let r_sec = 1.0 - binary_entropy(p_bit) - binary_entropy(p_phase);
    KeyRateResult {
        r_rep,
        p_bit,
        p_phase,
        r_sec,
        r_key: r_rep * r_sec.max(0.0),
        fidelity: state.fidelity_psi_plus(),
    }
}

/// `r_rep` when the state meets the fidelity threshold, zero otherwise.
pub fn edr_thresholded(r_rep: f64, state: &TwoQubitState<f64>, f_threshold: f64) -> f64 {
    if state.fidelity_psi_plus() >= f_threshold {
        r_rep
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0f64), 0.0);
        assert_eq!(binary_entropy(1.0f64), 0.0);
        assert_eq!(binary_entropy(0.5f64), 1.0);
        assert!((binary_entropy(0.11f64) - 0.499_915_958).abs() < 1e-8);
    }

    #[test]
    fn reference_qbers() {
        assert_eq!(qber(&TwoQubitState::<f64>::psi_plus()), (0.0, 0.0));
        assert_eq!(qber(&TwoQubitState::<f64>::maximally_mixed()), (0.5, 0.5));
    }

    #[test]
    fn key_rate_limits() {
        let perfect = secret_key_rate(1000.0, &TwoQubitState::psi_plus());
        assert_eq!(perfect.r_key, 1000.0);
        let mixed = secret_key_rate(1000.0, &TwoQubitState::maximally_mixed());
        assert_eq!(mixed.r_key, 0.0);
        assert!(mixed.r_sec < 0.0);
    }

    #[test]
    fn threshold_zero_always_passes() {
        let s = TwoQubitState::<f64>::maximally_mixed();
        assert_eq!(edr_thresholded(3.0, &s, 0.0), 3.0);
        assert_eq!(edr_thresholded(3.0, &s, 0.95), 0.0);
    }
}
