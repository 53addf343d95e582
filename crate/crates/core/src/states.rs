//! Source-state builders.
//!
//! Every builder returns a unit-trace pure state with bosonic modes truncated
//! at [`CUTOFF`]. Mode labels are fixed so that the elementary-link pipelines
//! can refer to them by name.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::fock::{DensityOperator, ModeRegister, ModeSpec, BRIGHT, CUTOFF, DARK};
use crate::scalar::Real;

/// Source brightnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// SPDC amplitude `lambda`, in `[0, 1)`.
    pub lambda: f64,
    /// Emission probability `q` of the atomic source, in `[0, 1]`.
    pub q: f64,
}

impl SourceParams {
    pub fn new(lambda: f64, q: f64) -> Result<Self> {
        check_lambda(lambda)?;
        check_probability("q", q)?;
        Ok(Self { lambda, q })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("{lambda} is outside [0, 1)"),
        })
    }
}

fn bosonic_register(labels: &[&str]) -> ModeRegister {
    ModeRegister::new(
        labels
            .iter()
            .map(|l| ModeSpec::bosonic(*l, CUTOFF).expect("positive cutoff"))
            .collect(),
    )
    .expect("distinct labels")
}

fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Two-mode SPDC state on `(s, i)`: amplitudes `1, lambda, lambda^2` on
/// `|00>, |11>, |22>`, renormalized after truncation.
pub fn spdc_pair<T: Real>(lambda: T) -> Result<DensityOperator<T>> {
    check_lambda(lambda.to_f64().unwrap_or(f64::NAN))?;
    let reg = bosonic_register(&["s", "i"]);
    let amps = (0..=2).map(|n| (reg.index_of(&[n, n]).unwrap(), real(lambda.powi(n as i32))));
    DensityOperator::make_pure(reg.clone(), amps.collect::<Vec<_>>())
}

/// Joint state of two SPDC sources on `(s1, i1, s2, i2)`, truncated at total
/// order `lambda^2`: exactly the six kets
/// `|0000>, |1100>, |0011>, |2200>, |0022>, |1111>`.
pub fn joint_spdc<T: Real>(lambda: T) -> Result<DensityOperator<T>> {
    check_lambda(lambda.to_f64().unwrap_or(f64::NAN))?;
    let reg = bosonic_register(&["s1", "i1", "s2", "i2"]);
    let l2 = lambda * lambda;
    let terms = [
        ([0, 0, 0, 0], T::one()),
        ([1, 1, 0, 0], lambda),
        ([0, 0, 1, 1], lambda),
        ([2, 2, 0, 0], l2),
        ([0, 0, 2, 2], l2),
        ([1, 1, 1, 1], l2),
    ];
    let amps: Vec<_> = terms
        .iter()
        .map(|(d, a)| (reg.index_of(d).unwrap(), real(*a)))
        .collect();
    DensityOperator::make_pure(reg, amps)
}

/// Atom-photon state `sqrt(1-q)|D,0> + sqrt(q)|B,1>` on `(atom, photon)`.
pub fn atom_photon_on<T: Real>(q: T, atom: &str, photon: &str) -> Result<DensityOperator<T>> {
    check_probability("q", q.to_f64().unwrap_or(f64::NAN))?;
    let reg = ModeRegister::new(vec![
        ModeSpec::atom(atom),
        ModeSpec::bosonic(photon, CUTOFF)?,
    ])?;
    let amps = [
        (reg.index_of(&[DARK, 0])?, real((T::one() - q).sqrt())),
        (reg.index_of(&[BRIGHT, 1])?, real(q.sqrt())),
    ];
    DensityOperator::make_pure(reg, amps)
}

/// [`atom_photon_on`] with modes labelled `a` and `p`.
pub fn atom_photon<T: Real>(q: T) -> Result<DensityOperator<T>> {
    atom_photon_on(q, "a", "p")
}

/// The ideal heralded memory pair `(|01> + |10>)/sqrt2` on `(i1, i2)`.
pub fn ideal_qm_pair<T: Real>() -> DensityOperator<T> {
    let reg = bosonic_register(&["i1", "i2"]);
    let h = real(T::from_f64(0.5).unwrap().sqrt());
    let amps = [
        (reg.index_of(&[0, 1]).unwrap(), h),
        (reg.index_of(&[1, 0]).unwrap(), h),
    ];
    DensityOperator::make_pure(reg, amps).expect("nonzero norm")
}
