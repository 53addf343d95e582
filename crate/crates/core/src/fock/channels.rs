use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::operator::{DensityOperator, LocalOperator};
use super::register::ModeKind;
use crate::error::{check_probability, Error, Result};
use crate::scalar::Real;

/// Sign attached to the second input port of the 50:50 beam splitter.
///
/// `Standard` maps `a_i -> (a_A + a_B)/sqrt2`, `a_j -> (a_A - a_B)/sqrt2`.
/// `SignFlipped` negates the `a_j` image; it exists to check that the
/// validation suite notices a wrong convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamSplitterConvention {
    #[default]
    Standard,
    SignFlipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorModel {
    /// Clicks on one or more photons.
    #[default]
    Threshold,
    /// Photon-number resolving; a heralding click means exactly one photon.
    Pnr,
}

impl DetectorModel {
    fn clicks(self, n: usize) -> bool {
        match self {
            DetectorModel::Threshold => n >= 1,
            DetectorModel::Pnr => n == 1,
        }
    }
}

/// Which single-click pattern to post-select on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickPattern {
    AOnly,
    /// Returned uncorrected: the conditional state carries the B-pattern phase.
    BOnly,
    /// A-only state with the probability of both single-click patterns.
    #[default]
    BothPatterns,
}

/// Outcome probabilities of a detector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternProbabilities<T> {
    pub a_only: T,
    pub b_only: T,
    /// Both detectors register a heralding click.
    pub both_click: T,
    /// Neither detector registers a heralding click.
    pub no_click: T,
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_usize(n - i).unwrap() / T::from_usize(i + 1).unwrap();
    }
    acc
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_usize(i).unwrap())
}

fn bosonic_cutoff<T: Real>(state: &DensityOperator<T>, label: &str) -> Result<usize> {
    match state.register().mode(label)?.kind() {
        ModeKind::Bosonic { cutoff } => Ok(cutoff),
        ModeKind::AtomicQubit => Err(Error::NotBosonic(label.to_string())),
    }
}

/// The two-mode beam-splitter unitary on `(i, j)` with cutoffs `(ci, cj)`.
///
/// Photon-number blocks that do not fit in both outputs are left as the
/// identity; the caller has to make sure they are empty.
pub fn beam_splitter_unitary<T: Real>(
    ci: usize,
    cj: usize,
    convention: BeamSplitterConvention,
) -> LocalOperator<T> {
    let (di, dj) = (ci + 1, cj + 1);
    let dim = di * dj;
    let closed = ci.min(cj);
    let sign = match convention {
        BeamSplitterConvention::Standard => T::one(),
        BeamSplitterConvention::SignFlipped => -T::one(),
    };
    let sqrt2 = T::from_f64(2.0).unwrap().sqrt();
    let mut u = vec![Complex::<T>::zero(); dim * dim];
    for ni in 0..di {
        for nj in 0..dj {
            let col = ni * dj + nj;
            if ni + nj > closed {
                u[col * dim + col] = Complex::new(T::one(), T::zero());
                continue;
            }
            let pref = T::one()
                / (sqrt2.powi((ni + nj) as i32) * (factorial::<T>(ni) * factorial::<T>(nj)).sqrt());
            let s_nj = if nj % 2 == 0 { T::one() } else { sign };
            for k1 in 0..=ni {
                for k2 in 0..=nj {
                    let na = k1 + k2;
                    let nb = ni + nj - na;
                    let parity = if (nj - k2) % 2 == 0 {
                        T::one()
                    } else {
                        -T::one()
                    };
                    let amp = binomial::<T>(ni, k1)
                        * binomial::<T>(nj, k2)
                        * s_nj
                        * parity
                        * pref
                        * (factorial::<T>(na) * factorial::<T>(nb)).sqrt();
                    let row = na * dj + nb;
                    u[row * dim + col].re = u[row * dim + col].re + amp;
                }
            }
        }
    }
    LocalOperator::from_dense(dim, &u).expect("square by construction")
}

/// Applies the 50:50 beam splitter with `mode_i` in the detector-A role and
/// `mode_j` in the detector-B role.
pub fn beam_splitter<T: Real>(
    state: &DensityOperator<T>,
    mode_i: &str,
    mode_j: &str,
    convention: BeamSplitterConvention,
) -> Result<DensityOperator<T>> {
    let ci = bosonic_cutoff(state, mode_i)?;
    let cj = bosonic_cutoff(state, mode_j)?;
    let closed = ci.min(cj);
    let pi = state.register().position(mode_i)?;
    let pj = state.register().position(mode_j)?;
    let dim = state.dim();
    for idx in 0..dim {
        let d = state.register().digits(idx);
        let photons = d[pi] + d[pj];
        if photons > closed && state.get(idx, idx).re > T::zero() {
            return Err(Error::CutoffOverflow {
                mode_i: mode_i.to_string(),
                mode_j: mode_j.to_string(),
                photons,
                cutoff: closed,
            });
        }
    }
    let u = beam_splitter_unitary(ci, cj, convention);
    state.apply_local(&[mode_i, mode_j], &u)
}

/// Binomial damping channel: every photon in `mode` is lost with probability `epsilon`.
pub fn loss_channel<T: Real>(
    state: &DensityOperator<T>,
    mode: &str,
    epsilon: T,
) -> Result<DensityOperator<T>> {
    check_probability("epsilon", epsilon.to_f64().unwrap_or(f64::NAN))?;
    let cutoff = bosonic_cutoff(state, mode)?;
    if epsilon.is_zero() {
        return Ok(state.clone());
    }
    let dim = cutoff + 1;
    let keep = T::one() - epsilon;
    let kraus: Vec<LocalOperator<T>> = (0..=cutoff)
        .map(|k| {
            let mut m = vec![T::zero(); dim * dim];
            for n in k..=cutoff {
                m[(n - k) * dim + n] =
                    (binomial::<T>(n, k) * keep.powi((n - k) as i32) * epsilon.powi(k as i32))
                        .sqrt();
            }
            LocalOperator::from_real(dim, &m).expect("square by construction")
        })
        .collect();
    state.apply_kraus(&[mode], &kraus)
}

fn detector_positions<T: Real>(
    state: &DensityOperator<T>,
    mode_a: &str,
    mode_b: &str,
) -> Result<[usize; 2]> {
    bosonic_cutoff(state, mode_a)?;
    bosonic_cutoff(state, mode_b)?;
    Ok([
        state.register().position(mode_a)?,
        state.register().position(mode_b)?,
    ])
}

/// Post-selects a single click on the detector pair `(mode_a, mode_b)` and
/// traces the detector modes out.
///
/// Returns the unnormalized conditional state and the probability of the
/// requested pattern(s).
pub fn condition_single_click<T: Real>(
    state: &DensityOperator<T>,
    mode_a: &str,
    mode_b: &str,
    detector: DetectorModel,
    which: ClickPattern,
) -> Result<(DensityOperator<T>, T)> {
    let pos = detector_positions(state, mode_a, mode_b)?;
    let a_only = |d: &[usize]| detector.clicks(d[0]) && d[1] == 0;
    let b_only = |d: &[usize]| d[0] == 0 && detector.clicks(d[1]);
    Ok(match which {
        ClickPattern::AOnly => {
            let s = state.trace_positions_selected(&pos, a_only);
            let p = s.trace();
            (s, p)
        }
        ClickPattern::BOnly => {
            let s = state.trace_positions_selected(&pos, b_only);
            let p = s.trace();
            (s, p)
        }
        ClickPattern::BothPatterns => {
            let s = state.trace_positions_selected(&pos, a_only);
            let pb = state.trace_positions_selected(&pos, b_only).trace();
            let p = s.trace() + pb;
            (s, p)
        }
    })
}

/// Probabilities of every detector-pair outcome class.
///
/// For threshold detectors the four classes partition the outcomes. For PNR
/// detectors, events with two or more photons on a detector fall into neither
/// single-click class nor `both_click`.
pub fn pattern_probabilities<T: Real>(
    state: &DensityOperator<T>,
    mode_a: &str,
    mode_b: &str,
    detector: DetectorModel,
) -> Result<PatternProbabilities<T>> {
    let pos = detector_positions(state, mode_a, mode_b)?;
    let c = |n: usize| detector.clicks(n);
    let prob = |f: &dyn Fn(&[usize]) -> bool| state.trace_positions_selected(&pos, f).trace();
    Ok(PatternProbabilities {
        a_only: prob(&|d| c(d[0]) && d[1] == 0),
        b_only: prob(&|d| d[0] == 0 && c(d[1])),
        both_click: prob(&|d| c(d[0]) && c(d[1])),
        no_click: prob(&|d| d[0] == 0 && d[1] == 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::register::{ModeRegister, ModeSpec};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn two_modes(cutoff: usize) -> ModeRegister {
        ModeRegister::new(vec![
            ModeSpec::bosonic("i", cutoff).unwrap(),
            ModeSpec::bosonic("j", cutoff).unwrap(),
        ])
        .unwrap()
    }

    fn fock(reg: &ModeRegister, ni: usize, nj: usize) -> DensityOperator<f64> {
        let idx = reg.index_of(&[ni, nj]).unwrap();
        DensityOperator::make_pure(reg.clone(), [(idx, c(1.0))]).unwrap()
    }

    #[test]
    fn single_photon_splits_evenly_with_plus_phase() {
        let reg = two_modes(3);
        let out = beam_splitter(&fock(&reg, 1, 0), "i", "j", Default::default()).unwrap();
        assert!((out.population(&[1, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((out.element(&[1, 0], &[0, 1]).unwrap().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn second_port_photon_has_minus_phase() {
        let reg = two_modes(3);
        let out = beam_splitter(&fock(&reg, 0, 1), "i", "j", Default::default()).unwrap();
        assert!((out.element(&[1, 0], &[0, 1]).unwrap().re + 0.5).abs() < 1e-15);
        // A symmetric single photon exits port A, or port B under the flipped sign.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sym =
            DensityOperator::make_pure(reg.clone(), [(1, c(s)), (reg.dim() / 4, c(s))]).unwrap();
        let std_out = beam_splitter(&sym, "i", "j", Default::default()).unwrap();
        assert!((std_out.population(&[1, 0]).unwrap() - 1.0).abs() < 1e-15);
        let flipped = beam_splitter(&sym, "i", "j", BeamSplitterConvention::SignFlipped).unwrap();
        assert!((flipped.population(&[0, 1]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_bunching() {
        let reg = two_modes(3);
        let out = beam_splitter(&fock(&reg, 1, 1), "i", "j", Default::default()).unwrap();
        assert!(out.population(&[1, 1]).unwrap().abs() < 1e-15);
        assert!((out.population(&[2, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((out.element(&[2, 0], &[0, 2]).unwrap().re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn vacuum_is_fixed() {
        let reg = two_modes(2);
        let vac = fock(&reg, 0, 0);
        assert_eq!(
            beam_splitter(&vac, "i", "j", Default::default()).unwrap(),
            vac
        );
    }

    #[test]
    fn overflow_and_kind_errors() {
        let reg = two_modes(2);
        let err = beam_splitter(&fock(&reg, 2, 1), "i", "j", Default::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::CutoffOverflow {
                photons: 3,
                cutoff: 2,
                ..
            }
        ));
        let mixed = ModeRegister::new(vec![
            ModeSpec::atom("a"),
            ModeSpec::bosonic("p", 1).unwrap(),
        ])
        .unwrap();
        let s = DensityOperator::make_pure(mixed, [(0, c(1.0))]).unwrap();
        assert_eq!(
            beam_splitter(&s, "a", "p", Default::default()).unwrap_err(),
            Error::NotBosonic("a".into())
        );
    }

    #[test]
    fn standard_splitter_is_self_inverse() {
        let reg = two_modes(3);
        let s = DensityOperator::make_pure(
            reg.clone(),
            [
                (reg.index_of(&[1, 1]).unwrap(), c(0.6)),
                (reg.index_of(&[2, 0]).unwrap(), c(0.8)),
            ],
        )
        .unwrap();
        let bs = |x: &DensityOperator<f64>| beam_splitter(x, "i", "j", Default::default()).unwrap();
        let back = bs(&bs(&s));
        for (a, b) in back.as_slice().iter().zip(s.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn loss_on_one_and_two_photons() {
        let reg = two_modes(3);
        let eps = 0.3;
        let one = loss_channel(&fock(&reg, 1, 0), "i", eps).unwrap();
        assert!((one.population(&[1, 0]).unwrap() - 0.7).abs() < 1e-15);
        assert!((one.population(&[0, 0]).unwrap() - 0.3).abs() < 1e-15);
        let two = loss_channel(&fock(&reg, 2, 0), "i", eps).unwrap();
        assert!((two.population(&[2, 0]).unwrap() - 0.49).abs() < 1e-15);
        assert!((two.population(&[1, 0]).unwrap() - 0.42).abs() < 1e-15);
        assert!((two.population(&[0, 0]).unwrap() - 0.09).abs() < 1e-15);
        assert_eq!(loss_channel(&two, "j", 0.0).unwrap(), two);
        assert!(matches!(
            loss_channel(&two, "j", 1.5).unwrap_err(),
            Error::InvalidProbability { .. }
        ));
    }

    #[test]
    fn click_conditioning_examples() {
        let reg = two_modes(3);
        let (_, p) = condition_single_click(
            &fock(&reg, 1, 0),
            "i",
            "j",
            DetectorModel::Threshold,
            ClickPattern::AOnly,
        )
        .unwrap();
        assert_eq!(p, 1.0);
        let (_, p) = condition_single_click(
            &fock(&reg, 2, 0),
            "i",
            "j",
            DetectorModel::Pnr,
            ClickPattern::AOnly,
        )
        .unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(
            condition_single_click(
                &fock(&reg, 2, 0),
                "x",
                "j",
                DetectorModel::Pnr,
                ClickPattern::AOnly
            )
            .unwrap_err(),
            Error::UnknownMode("x".into())
        );
    }

    #[test]
    fn threshold_patterns_partition_unity() {
        let reg = two_modes(3);
        let s =
            DensityOperator::make_pure(reg.clone(), (0..reg.dim()).map(|k| (k, c(1.0 + k as f64))))
                .unwrap();
        let p = pattern_probabilities(&s, "i", "j", DetectorModel::Threshold).unwrap();
        assert!((p.a_only + p.b_only + p.both_click + p.no_click - 1.0).abs() < 1e-12);
    }
}
