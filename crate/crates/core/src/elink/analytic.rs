//! Closed-form link states, evaluated over any [`Scalar`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{half, lit, Scalar};
use crate::two_qubit::{TwoQubitState, BD, DB};

fn l<S: Scalar>(v: i64) -> S {
    lit(v)
}

fn x_state<S: Scalar>(
    n: S,
    name: &'static str,
    bb: S,
    bd: S,
    db: S,
    dd: S,
    coh: S,
) -> Result<TwoQubitState<S>> {
    if n.is_zero() {
        return Err(Error::VanishingNormalization(name));
    }
    Ok(TwoQubitState::x_state(
        [
            bb / n.clone(),
            bd / n.clone(),
            db / n.clone(),
            dd / n.clone(),
        ],
        Complex::new(coh / n, S::zero()),
    ))
}

/// Threshold-detector hybrid link.
pub fn analytic_raw<S: Scalar>(q: S, lambda: S, er: S, el: S) -> Result<TwoQubitState<S>> {
    let l2 = lambda.clone() * lambda;
    let q2 = q.clone() * q.clone();
    let el2 = el.clone() * el.clone();
    let er_el = er.clone() * el.clone();
    let one = S::one();

    let n = l2.clone()
        * (l::<S>(19) * er.clone() * el2.clone() * q2.clone()
            - l::<S>(6) * er_el.clone() * q2.clone()
            + l::<S>(26) * er_el.clone() * q.clone()
            + l::<S>(3) * er.clone() * q2.clone()
            + l::<S>(6) * er.clone() * q.clone()
            + l::<S>(4) * er.clone()
            + l::<S>(9) * el2.clone() * q2.clone()
            - l::<S>(2) * el.clone() * q2.clone()
            + l::<S>(14) * el.clone() * q.clone()
            + q2.clone()
            + l::<S>(2) * q.clone()
            + l::<S>(4))
        + l::<S>(8) * el.clone() * q2.clone()
        + l::<S>(8) * q.clone();

    let bb = q2.clone()
        * (l2.clone()
            * (l::<S>(19) * er.clone() * el2.clone()
                + l::<S>(20) * er_el.clone()
                + l::<S>(13) * er.clone()
                + l::<S>(9) * el2.clone()
                + l::<S>(12) * el.clone()
                + l::<S>(7))
            + l::<S>(8) * el.clone()
            + l::<S>(8));
    let bd = q.clone()
        * (l2.clone()
            * (l::<S>(13) * er_el.clone() * (one.clone() - q.clone())
                + l::<S>(7) * er.clone() * (one.clone() - q.clone())
                + l::<S>(7) * el.clone() * (one.clone() - q.clone())
                + l::<S>(5) * (one.clone() - q.clone()))
            + l::<S>(4) * (one.clone() - q.clone()));
    let coh = l::<S>(4)
        * q.clone()
        * (l2.clone()
            * (-(er_el.clone() * q.clone()) + er_el.clone() - er.clone() * q.clone() + er.clone()
                - el.clone() * q.clone()
                + el.clone()
                - q.clone()
                + one.clone())
            - q.clone()
            + one.clone());
    let omq = one - q;
    let dd = l::<S>(4) * l2 * (er + S::one()) * omq.clone() * omq;
    x_state(n, "N_raw", bb, bd.clone(), bd, dd, coh)
}

/// PNR-detector hybrid link.
pub fn analytic_pnr<S: Scalar>(q: S, lambda: S, er: S, el: S) -> Result<TwoQubitState<S>> {
    let l2 = lambda.clone() * lambda;
    let q2 = q.clone() * q.clone();
    let er_el = er.clone() * el.clone();
    let omq = S::one() - q.clone();
    let n = l2.clone()
        * (l::<S>(10) * er_el.clone() * el.clone() * q2.clone()
            - l::<S>(8) * er_el.clone() * q2.clone()
            + l::<S>(8) * er_el.clone() * q.clone()
            + er.clone() * omq.clone() * omq.clone())
        + l::<S>(2) * el.clone() * q2.clone()
        - q2.clone()
        + q.clone();
    let bb = l::<S>(2) * el * q2 * (l::<S>(5) * l2.clone() * er_el.clone() + S::one());
    let bd =
        q.clone() * (l::<S>(8) * l2.clone() * er_el.clone() * omq.clone() + omq.clone()) * half();
    let coh = q * (l::<S>(4) * l2.clone() * er_el * omq.clone() + omq.clone()) * half();
    let dd = l2 * er * omq.clone() * omq;
    x_state(n, "N_PNR", bb, bd.clone(), bd, dd, coh)
}

/// EPL output written in terms of the input entries.
pub fn analytic_epl<S: Scalar>(raw: &TwoQubitState<S>) -> Result<TwoQubitState<S>> {
    let [r00, r11, r22, r33] = raw.diag();
    let r12 = raw.get(BD, DB).clone();
    let r21 = raw.get(DB, BD).clone();
    let err = r00 * r33;
    let good = r11 * r22;
    let n = l::<S>(2) * (err.clone() + good.clone());
    if n.is_zero() {
        return Err(Error::VanishingNormalization("N_EPL"));
    }
    let coh = r12 * r21;
    Ok(TwoQubitState::x_state(
        [
            err.clone() / n.clone(),
            good.clone() / n.clone(),
            good / n.clone(),
            err / n.clone(),
        ],
        Complex::new(coh.re / n.clone(), coh.im / n),
    ))
}

/// Re-emission output written in terms of the input entries.
pub fn analytic_re<S: Scalar>(
    raw: &TwoQubitState<S>,
    lambda: S,
    er: S,
    el: S,
) -> Result<TwoQubitState<S>> {
    let [r00, r11, r22, r33] = raw.diag();
    let r12 = raw.get(BD, DB).clone();
    let l2 = lambda.clone() * lambda;
    let er_el = er.clone() * el.clone();
    let el2 = el.clone() * el.clone();
    let pop_factor =
        l::<S>(13) * er_el.clone() + l::<S>(7) * er.clone() + l::<S>(7) * el.clone() + l::<S>(5);
    let a = r33.clone()
        * (l::<S>(19) * er.clone() * el2.clone()
            + l::<S>(20) * er_el.clone()
            + l::<S>(13) * er.clone()
            + l::<S>(9) * el2
            + l::<S>(12) * el.clone()
            + l::<S>(7));
    let b = l::<S>(4) * r00.clone() * (er.clone() + S::one())
        + (r11.clone() + r22.clone()) * pop_factor.clone()
        + a.clone();
    let n = l::<S>(4) * (r11.clone() + r22.clone())
        + l::<S>(8) * r33.clone() * (el.clone() + S::one())
        + l2.clone() * b;
    if n.is_zero() {
        return Err(Error::VanishingNormalization("N_RE"));
    }
    let bb = l::<S>(8) * r33 * (el.clone() + S::one()) + l2.clone() * a;
    let bd = l::<S>(4) * r22.clone() + l2.clone() * r22 * pop_factor.clone();
    let db = l::<S>(4) * r11.clone() + l2.clone() * r11 * pop_factor;
    let coh_factor = l::<S>(4) + l2.clone() * l::<S>(4) * (er_el + er.clone() + el + S::one());
    let dd = l2 * l::<S>(4) * r00 * (er + S::one());
    let [bb, bd, db, dd] = [bb, bd, db, dd].map(|v| v / n.clone());
    let coh = Complex::new(
        r12.re * coh_factor.clone() / n.clone(),
        r12.im * coh_factor / n,
    );
    Ok(TwoQubitState::x_state([bb, bd, db, dd], coh))
}

/// PNR link followed by EPL, to leading order in `lambda^2`; independent of `q`.
pub fn analytic_pnr_epl<S: Scalar>(lambda: S, er: S, el: S) -> Result<TwoQubitState<S>> {
    let x = l::<S>(4) * lambda.clone() * lambda * er * el;
    if l::<S>(2) * x.clone() > half() {
        return Err(Error::OutsideValidity(format!(
            "8 lambda^2 eps_r eps_l = {} exceeds 1/2",
            (l::<S>(2) * x).to_f64_lossy()
        )));
    }
    let pop = half::<S>() - x.clone();
    let coh = half::<S>() - l::<S>(2) * x.clone();
    Ok(TwoQubitState::x_state(
        [x.clone(), pop.clone(), pop, x],
        Complex::new(coh, S::zero()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_qubit::{BB, DD};
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    fn r(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn printed_raw_matrix() {
        let s = analytic_raw(0.1f64, 0.1, 0.5, 0.0).unwrap();
        let d = s.diag();
        for (got, want) in d.iter().zip([0.094, 0.425, 0.425, 0.056]) {
            assert!((got - want).abs() < 5e-4, "{got} vs {want}");
        }
        assert!((s.coherence().re - 0.422).abs() < 5e-4);
        assert!((s.fidelity_psi_plus() - 0.847).abs() < 1e-3);
    }

    #[test]
    fn raw_without_spdc_pairs_has_no_dd() {
        let s = analytic_raw(r(1, 5), Q::zero(), r(1, 2), Q::zero()).unwrap();
        assert_eq!(s.trace(), Q::one());
        assert_eq!(s.population(DD), Q::zero());
    }

    #[test]
    fn pnr_bb_entry() {
        let (q, lam, er, el) = (r(1, 10), r(1, 10), r(1, 2), r(3, 10));
        let s = analytic_pnr(q.clone(), lam.clone(), er.clone(), el.clone()).unwrap();
        let l2 = lam.clone() * lam.clone();
        let omq = Q::one() - q.clone();
        let n = l2.clone()
            * (r(10, 1) * er.clone() * el.clone() * el.clone() * q.clone() * q.clone()
                - r(8, 1) * er.clone() * el.clone() * q.clone() * q.clone()
                + r(8, 1) * er.clone() * el.clone() * q.clone()
                + er.clone() * omq.clone() * omq)
            + r(2, 1) * el.clone() * q.clone() * q.clone()
            - q.clone() * q.clone()
            + q.clone();
        let bb = r(2, 1) * el.clone() * q.clone() * q * (r(5, 1) * l2 * er * el + Q::one()) / n;
        assert_eq!(s.population(BB), bb);
        assert_eq!(s.trace(), Q::one());
        let zero_loss = analytic_pnr(r(1, 10), r(1, 10), r(1, 2), Q::zero()).unwrap();
        assert_eq!(zero_loss.population(BB), Q::zero());
    }

    #[test]
    fn epl_fixed_points() {
        let psi = TwoQubitState::<Q>::psi_plus();
        assert_eq!(analytic_epl(&psi).unwrap(), psi);
        let noisy = TwoQubitState::x_state(
            [Q::zero(), r(3, 5), r(2, 5), Q::zero()],
            Complex::new(r(1, 5), Q::zero()),
        );
        let out = analytic_epl(&noisy).unwrap();
        assert_eq!(out.diag(), [Q::zero(), r(1, 2), r(1, 2), Q::zero()]);
    }

    #[test]
    fn pnr_epl_examples() {
        let ideal = analytic_pnr_epl(r(1, 10), r(1, 2), Q::zero()).unwrap();
        assert_eq!(ideal, TwoQubitState::psi_plus());
        let s = analytic_pnr_epl(r(1, 10), r(1, 2), r(1, 2)).unwrap();
        assert_eq!(s.population(BB), r(1, 100));
        assert_eq!(s.population(DD), r(1, 100));
        assert_eq!(s.trace(), Q::one());
        assert!(analytic_pnr_epl(r(9, 10), Q::one(), Q::one()).is_err());
    }
}
