//! Two-qubit density matrices on the atomic basis `{BB, BD, DB, DD}`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeKind};
use crate::scalar::{half, lit, Real, Scalar};

/// Basis index of `|BB>`.
pub const BB: usize = 0;
/// Basis index of `|BD>`.
pub const BD: usize = 1;
/// Basis index of `|DB>`.
pub const DB: usize = 2;
/// Basis index of `|DD>`.
pub const DD: usize = 3;

/// A 4x4 density matrix. With `B -> 0`, `D -> 1` the basis is the logical
/// computational basis `{00, 01, 10, 11}`, first qubit most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState<S> {
    m: [[Complex<S>; 4]; 4],
}

fn zeros<S: Scalar>() -> [[Complex<S>; 4]; 4] {
    std::array::from_fn(|_| std::array::from_fn(|_| Complex::zero()))
}

fn re<S: Scalar>(x: S) -> Complex<S> {
    Complex::new(x, S::zero())
}

impl<S: Scalar> TwoQubitState<S> {
    pub fn from_matrix(m: [[Complex<S>; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn from_real(m: [[S; 4]; 4]) -> Self {
        Self {
            m: m.map(|row| row.map(re)),
        }
    }

    /// A state whose only coherence is `<BD|rho|DB> = coherence`.
    pub fn x_state(diag: [S; 4], coherence: Complex<S>) -> Self {
        let mut m = zeros::<S>();
        for (k, d) in diag.into_iter().enumerate() {
            m[k][k] = re(d);
        }
        m[BD][DB] = coherence.clone();
        m[DB][BD] = coherence.conj();
        Self { m }
    }

    pub fn zero() -> Self {
        Self { m: zeros() }
    }

    /// `|Psi+> = (|BD> + |DB>)/sqrt2`.
    pub fn psi_plus() -> Self {
        Self::x_state([S::zero(), half(), half(), S::zero()], re(half()))
    }

    pub fn maximally_mixed() -> Self {
        let q = S::one() / lit(4);
        Self::x_state([q.clone(), q.clone(), q.clone(), q], Complex::zero())
    }

    /// `F |Psi+><Psi+| + (1-F)/3 (I - |Psi+><Psi+|)`.
    pub fn werner(fidelity: S) -> Self {
        let e = (S::one() - fidelity.clone()) / lit(3);
        let pop = (fidelity.clone() + e.clone()) * half();
        let coh = (fidelity - e.clone()) * half();
        Self::x_state([e.clone(), pop.clone(), pop, e], re(coh))
    }

    /// Projector onto the Bell state with index `k` in `[Phi+, Phi-, Psi+, Psi-]`.
    pub fn bell(k: usize) -> Self {
        let h = half::<S>();
        let mut m = zeros::<S>();
        let (a, b, sign) = match k {
            0 => (BB, DD, S::one()),
            1 => (BB, DD, -S::one()),
            2 => (BD, DB, S::one()),
            3 => (BD, DB, -S::one()),
            _ => panic!("Bell index {k} out of range"),
        };
        m[a][a] = re(h.clone());
        m[b][b] = re(h.clone());
        m[a][b] = re(h.clone() * sign.clone());
        m[b][a] = re(h * sign);
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex<S>; 4]; 4] {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> &Complex<S> {
        &self.m[row][col]
    }

    pub fn population(&self, k: usize) -> S {
        self.m[k][k].re.clone()
    }

    pub fn diag(&self) -> [S; 4] {
        std::array::from_fn(|k| self.population(k))
    }

    /// `<BD|rho|DB>`.
    pub fn coherence(&self) -> Complex<S> {
        self.m[BD][DB].clone()
    }

    pub fn trace(&self) -> S {
        (0..4).fold(S::zero(), |acc, k| acc + self.population(k))
    }

    pub fn scale(&self, f: S) -> Self {
        Self {
            m: self.m.clone().map(|row| row.map(|z| z * f.clone())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.m.clone();
        for (r, row) in m.iter_mut().enumerate() {
            for (c, z) in row.iter_mut().enumerate() {
                *z = z.clone() + other.m[r][c].clone();
            }
        }
        Self { m }
    }

    /// Unit-trace copy plus the original trace.
    pub fn normalize(&self, branch: &'static str) -> Result<(Self, S)> {
        let tr = self.trace();
        if tr <= S::zero() {
            return Err(Error::ZeroProbability(branch));
        }
        Ok((self.scale(S::one() / tr.clone()), tr))
    }

    /// `<Psi+|rho|Psi+> = (rho_11 + rho_22 + 2 Re rho_12) / 2`.
    pub fn fidelity_psi_plus(&self) -> S {
        (self.population(BD) + self.population(DB) + lit::<S>(2) * self.m[BD][DB].re.clone())
            * half()
    }

    /// `max_ij |rho_ij - conj(rho_ji)|_1` (sum of real and imaginary defects).
    pub fn hermiticity_defect(&self) -> S {
        let mut worst = S::zero();
        for r in 0..4 {
            for c in r..4 {
                let d = self.m[r][c].clone() - self.m[c][r].conj();
                let v = crate::scalar::abs(d.re) + crate::scalar::abs(d.im);
                if v > worst {
                    worst = v;
                }
            }
        }
        worst
    }

    /// Coefficients `c_0..c_4` of `det(x I - rho)` by Faddeev-LeVerrier.
    pub fn characteristic_polynomial(&self) -> [S; 5] {
        let mul = |a: &[[Complex<S>; 4]; 4], b: &[[Complex<S>; 4]; 4]| {
            let mut out = zeros::<S>();
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = Complex::zero();
                    for k in 0..4 {
                        acc = acc + a[i][k].clone() * b[k][j].clone();
                    }
                    out[i][j] = acc;
                }
            }
            out
        };
        let mut coeffs: [S; 5] = std::array::from_fn(|_| S::zero());
        coeffs[4] = S::one();
        let mut mk = zeros::<S>();
        for k in 1..=4 {
            let mut next = mul(&self.m, &mk);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] = row[i].clone() + re(coeffs[5 - k].clone());
            }
            mk = next;
            let amk = mul(&self.m, &mk);
            let tr = (0..4).fold(S::zero(), |acc, i| acc + amk[i][i].re.clone());
            coeffs[4 - k] = -tr / lit(k as i64);
        }
        coeffs
    }

    /// Exact positivity test: a Hermitian matrix is PSD iff the coefficients
    /// of its characteristic polynomial alternate in sign.
    pub fn is_psd_exact(&self) -> bool {
        let c = self.characteristic_polynomial();
        (0..4).all(|k| {
            let v = if (4 - k) % 2 == 0 {
                c[k].clone()
            } else {
                -c[k].clone()
            };
            v >= S::zero()
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&S) -> U) -> TwoQubitState<U> {
        TwoQubitState {
            m: std::array::from_fn(|r| {
                std::array::from_fn(|c| Complex::new(f(&self.m[r][c].re), f(&self.m[r][c].im)))
            }),
        }
    }

    pub fn to_f64(&self) -> TwoQubitState<f64> {
        self.map(|x| x.to_f64_lossy())
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.to_f64();
        let b = other.to_f64();
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((a.m[r][c] - b.m[r][c]).norm());
            }
        }
        worst
    }
}

impl<T: Real> TwoQubitState<T> {
    /// Reads a two-atom register (any labels) into the fixed basis.
    pub fn from_operator(op: &DensityOperator<T>) -> Result<Self> {
        let reg = op.register();
        if reg.len() != 2 {
            return Err(Error::OperatorShape {
                expected: 4,
                got: reg.dim(),
            });
        }
        for m in reg.modes() {
            if m.kind() != ModeKind::AtomicQubit {
                return Err(Error::NotAtomic(m.label().to_string()));
            }
        }
        Ok(Self {
            m: std::array::from_fn(|r| std::array::from_fn(|c| op.get(r, c))),
        })
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> T
    where
        T: nalgebra::RealField,
    {
        crate::scalar::min_hermitian_eigenvalue(nalgebra::DMatrix::from_fn(4, 4, |r, c| {
            self.m[r][c]
        }))
    }

    /// Hermiticity, positivity and unit trace at the project tolerances.
    pub fn check_physical(&self) -> std::result::Result<(), String>
    where
        T: nalgebra::RealField,
    {
        let herm = num_traits::ToPrimitive::to_f64(&self.hermiticity_defect()).unwrap();
        if herm > crate::HERMITICITY_TOL {
            return Err(format!("hermiticity defect {herm:e}"));
        }
        let tr = num_traits::ToPrimitive::to_f64(&self.trace()).unwrap();
        if (tr - 1.0).abs() > crate::STATE_TRACE_TOL {
            return Err(format!("trace {tr}"));
        }
        let eig = num_traits::ToPrimitive::to_f64(&self.min_eigenvalue()).unwrap();
        if eig < -crate::PSD_TOL {
            return Err(format!("minimum eigenvalue {eig:e}"));
        }
        Ok(())
    }
}

impl<S: Scalar> Default for TwoQubitState<S> {
    fn default() -> Self {
        Self::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    #[test]
    fn fidelity_of_reference_states() {
        assert_eq!(TwoQubitState::<f64>::psi_plus().fidelity_psi_plus(), 1.0);
        assert_eq!(
            TwoQubitState::<f64>::maximally_mixed().fidelity_psi_plus(),
            0.25
        );
        let w: TwoQubitState<BigRational> =
            TwoQubitState::werner(BigRational::new(9.into(), 10.into()));
        assert_eq!(w.fidelity_psi_plus(), BigRational::new(9.into(), 10.into()));
        assert_eq!(w.trace(), BigRational::one());
    }

    #[test]
    fn bell_projectors_sum_to_identity() {
        let sum = (0..4).fold(TwoQubitState::<f64>::zero(), |acc, k| {
            acc.add(&TwoQubitState::bell(k))
        });
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((sum.get(r, c).re - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_psd_test() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let ok = TwoQubitState::x_state(
            [r(1, 10), r(2, 5), r(2, 5), r(1, 10)],
            Complex::new(r(2, 5), r(0, 1)),
        );
        assert!(ok.is_psd_exact());
        let bad = TwoQubitState::x_state(
            [r(1, 10), r(2, 5), r(2, 5), r(1, 10)],
            Complex::new(r(1, 2), r(0, 1)),
        );
        assert!(!bad.is_psd_exact());
    }

    #[test]
    fn float_physical_check() {
        let s = TwoQubitState::<f64>::werner(0.8);
        assert!(s.check_physical().is_ok());
        assert!((s.min_eigenvalue() - 0.2 / 3.0).abs() < 1e-12);
        let bad = TwoQubitState::<f64>::x_state([0.0, 0.5, 0.5, 0.0], Complex::new(0.6, 0.0));
        assert!(bad.check_physical().is_err());
    }
}
