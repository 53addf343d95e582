//! Deterministic two-qubit processing at the QPUs: EPL distillation, Pauli
//! frames and Bell-measurement merging.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::two_qubit::TwoQubitState;

/// Logical value of the target measurement that EPL keeps.
pub const EPL_KEPT_OUTCOME: usize = 1;

/// Post-selected output of a probabilistic protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct DistillResult<S> {
    pub state: TwoQubitState<S>,
    pub p_success: S,
}

/// Unnormalized control-pair state of EPL for target outcomes `(m1, m2)`.
///
/// Pair `a` holds the controls, pair `b` the targets; each node applies a
/// CNOT from its `a` qubit to its `b` qubit and measures the target.
pub fn epl_branch<S: Scalar>(
    a: &TwoQubitState<S>,
    b: &TwoQubitState<S>,
    m1: usize,
    m2: usize,
) -> TwoQubitState<S> {
    let idx = |x: usize, y: usize| 2 * x + y;
    let m = std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let (x, y) = (r >> 1, r & 1);
            let (x2, y2) = (c >> 1, c & 1);
            a.get(r, c).clone() * b.get(idx(m1 ^ x, m2 ^ y), idx(m1 ^ x2, m2 ^ y2)).clone()
        })
    });
    TwoQubitState::from_matrix(m)
}

/// EPL distillation keeping the branch where both targets read logical 1.
pub fn epl<S: Scalar>(a: &TwoQubitState<S>, b: &TwoQubitState<S>) -> Result<DistillResult<S>> {
    let branch = epl_branch(a, b, EPL_KEPT_OUTCOME, EPL_KEPT_OUTCOME);
    let (state, p_success) = branch.normalize("epl")?;
    Ok(DistillResult { state, p_success })
}

/// Conjugates qubit `qubit` (0 = first) by the real single-qubit matrix `u`.
pub fn apply_single_qubit<S: Scalar>(
    state: &TwoQubitState<S>,
    qubit: usize,
    u: &[[S; 2]; 2],
) -> TwoQubitState<S> {
    let split = |i: usize| {
        if qubit == 0 {
            (i >> 1, i & 1)
        } else {
            (i & 1, i >> 1)
        }
    };
    let join = |t: usize, o: usize| if qubit == 0 { 2 * t + o } else { 2 * o + t };
    let m = std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let (tr, or) = split(r);
            let (tc, oc) = split(c);
            let mut acc = Complex::<S>::zero();
            for k in 0..2 {
                for l in 0..2 {
                    let w = u[tr][k].clone() * u[tc][l].clone();
                    if !w.is_zero() {
                        acc = acc + state.get(join(k, or), join(l, oc)).clone() * w;
                    }
                }
            }
            acc
        })
    });
    TwoQubitState::from_matrix(m)
}

fn pauli_x<S: Scalar>() -> [[S; 2]; 2] {
    [[S::zero(), S::one()], [S::one(), S::zero()]]
}

fn pauli_z<S: Scalar>() -> [[S; 2]; 2] {
    [[S::one(), S::zero()], [S::zero(), -S::one()]]
}

/// `(X (x) X) rho (X (x) X)`.
pub fn pauli_x_both<S: Scalar>(state: &TwoQubitState<S>) -> TwoQubitState<S> {
    let m = std::array::from_fn(|r| std::array::from_fn(|c| state.get(3 - r, 3 - c).clone()));
    TwoQubitState::from_matrix(m)
}

/// Bell measurement on the middle qubits of `ab (x) bc`, Pauli-corrected on
/// `C` and averaged over the four outcomes.
///
/// Corrections are chosen so that `|Psi+> (x) |Psi+>` maps to `|Psi+>` for
/// every outcome: `Phi+ -> X`, `Phi- -> ZX`, `Psi+ -> I`, `Psi- -> Z`.
pub fn bell_swap_merge<S: Scalar>(
    ab: &TwoQubitState<S>,
    bc: &TwoQubitState<S>,
) -> TwoQubitState<S> {
    let x = pauli_x::<S>();
    let z = pauli_z::<S>();
    let mut total = TwoQubitState::zero();
    for k in 0..4 {
        let proj = TwoQubitState::<S>::bell(k);
        let m = std::array::from_fn(|r| {
            std::array::from_fn(|col| {
                let (a, c) = (r >> 1, r & 1);
                let (a2, c2) = (col >> 1, col & 1);
                let mut acc = Complex::<S>::zero();
                for beta in 0..4 {
                    let (b, bp) = (beta >> 1, beta & 1);
                    for gamma in 0..4 {
                        let w = proj.get(gamma, beta);
                        if w.is_zero() {
                            continue;
                        }
                        let (g, gp) = (gamma >> 1, gamma & 1);
                        let x1 = ab.get(2 * a + b, 2 * a2 + g).clone();
                        let x2 = bc.get(2 * bp + c, 2 * gp + c2).clone();
                        acc = acc + w.clone() * x1 * x2;
                    }
                }
                acc
            })
        });
        let mut branch = TwoQubitState::from_matrix(m);
        match k {
            0 => branch = apply_single_qubit(&branch, 1, &x),
            1 => {
                branch = apply_single_qubit(&branch, 1, &x);
                branch = apply_single_qubit(&branch, 1, &z);
            }
            2 => {}
            _ => branch = apply_single_qubit(&branch, 1, &z),
        }
        total = total.add(&branch);
    }
    total
}

/// End-to-end state of `hops + 1` identical links merged left to right.
pub fn chain_state<S: Scalar>(link: &TwoQubitState<S>, hops: usize) -> TwoQubitState<S> {
    (0..hops).fold(link.clone(), |acc, _| bell_swap_merge(&acc, link))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    type Q = BigRational;

    fn r(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn epl_on_psi_plus_is_exact() {
        let psi = TwoQubitState::<Q>::psi_plus();
        let out = epl(&psi, &psi).unwrap();
        assert_eq!(out.state, psi);
        assert_eq!(out.p_success, r(1, 2));
    }

    #[test]
    fn epl_branches_sum_to_one() {
        let w = TwoQubitState::<Q>::werner(r(7, 10));
        let rho = TwoQubitState::x_state(
            [r(1, 10), r(2, 5), r(3, 10), r(1, 5)],
            Complex::new(r(1, 4), r(1, 20)),
        );
        let total = (0..4).fold(Q::zero(), |acc, k| {
            acc + epl_branch(&w, &rho, k >> 1, k & 1).trace()
        });
        assert_eq!(total, Q::one());
    }

    #[test]
    fn x_both_swaps_bb_and_dd() {
        let bb = TwoQubitState::<f64>::x_state([1.0, 0.0, 0.0, 0.0], Complex::zero());
        assert_eq!(pauli_x_both(&bb).population(3), 1.0);
        let psi = TwoQubitState::<f64>::psi_plus();
        assert_eq!(pauli_x_both(&psi), psi);
        let via_single = apply_single_qubit(&apply_single_qubit(&bb, 0, &pauli_x()), 1, &pauli_x());
        assert_eq!(via_single, pauli_x_both(&bb));
    }

    #[test]
    fn ideal_swap_and_werner_preservation() {
        let psi = TwoQubitState::<Q>::psi_plus();
        assert_eq!(bell_swap_merge(&psi, &psi), psi);
        let w = TwoQubitState::<Q>::werner(r(4, 5));
        assert_eq!(bell_swap_merge(&w, &psi).fidelity_psi_plus(), r(4, 5));
        assert_eq!(bell_swap_merge(&psi, &w).fidelity_psi_plus(), r(4, 5));
        assert_eq!(chain_state(&w, 0), w);
    }
}
