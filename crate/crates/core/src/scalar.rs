//! Numeric abstractions.
//!
//! Two tiers are used throughout the crate:
//!
//! * [`Scalar`] is any ordered field with exact construction from small
//!   integers. The closed-form density matrices, the distillation and merging
//!   maps, and the combinatorial rate helpers are written against it, so they
//!   evaluate identically over `f32`, `f64` and `BigRational`.
//! * [`Real`] adds the transcendental operations (`sqrt`, `log2`, `powf`) that
//!   the Fock-space engine and the entropy-based key rates need.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// An ordered field element usable by the closed-form and post-processing code.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static
{
    /// Best-effort conversion for reporting; exact types round to nearest.
    fn to_f64_lossy(&self) -> f64;
}

impl<T> Scalar for T
where
    T: Num
        + Neg<Output = T>
        + Clone
        + PartialOrd
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Send
        + Sync
        + 'static,
{
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// A floating-point scalar (`f32` or `f64`).
pub trait Real: Scalar + Float + Copy {}

impl<T> Real for T where T: Scalar + Float + Copy {}

/// Exact conversion of a small integer literal into any [`Scalar`].
#[inline]
pub fn lit<S: Scalar>(v: i64) -> S {
    S::from_i64(v).expect("small integer literal is representable")
}

/// Conversion of an `f64` parameter into the working scalar.
#[inline]
pub fn from_f64<S: Scalar>(v: f64) -> S {
    S::from_f64(v).expect("finite f64 is representable")
}

/// `1/2` in the working scalar.
#[inline]
pub fn half<S: Scalar>() -> S {
    S::one() / lit(2)
}

/// `|x|` for any ordered field.
#[inline]
pub fn abs<S: Scalar>(x: S) -> S {
    if x < S::zero() {
        -x
    } else {
        x
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
///
/// The spectrum is taken of `m + s I` with `s` the Frobenius norm, then shifted
/// back. nalgebra's implicit-shift QR can return `-inf` on block-diagonal inputs
/// with exactly zero blocks (a product of pure states is enough), and the
/// shift keeps those blocks away from zero.
pub fn min_hermitian_eigenvalue<T>(m: nalgebra::DMatrix<num_complex::Complex<T>>) -> T
where
    T: Real + nalgebra::RealField,
{
    let n = m.nrows();
    let s = m
        .iter()
        .map(|z| z.norm_sqr())
        .fold(<T as num_traits::Zero>::zero(), |a, b| a + b);
    let s = <T as Float>::sqrt(s);
    let s = <T as Float>::max(s, <T as num_traits::One>::one());
    let shifted =
        m + nalgebra::DMatrix::from_diagonal_element(n, n, num_complex::Complex::new(s, T::zero()));
    shifted
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(<T as Float>::infinity(), <T as Float>::min)
        - s
}
