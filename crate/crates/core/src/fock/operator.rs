use num_complex::Complex;
use num_traits::Zero;

use super::register::ModeRegister;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A small operator acting on a subset of modes, stored densely with a
/// per-row list of its nonzero entries.
#[derive(Debug, Clone)]
pub struct LocalOperator<T> {
    dim: usize,
    rows: Vec<Vec<(usize, Complex<T>)>>,
}

impl<T: Real> LocalOperator<T> {
    /// Builds from a row-major `dim x dim` matrix.
    pub fn from_dense(dim: usize, entries: &[Complex<T>]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::OperatorShape {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let rows = (0..dim)
            .map(|r| {
                (0..dim)
                    .filter_map(|c| {
                        let v = entries[r * dim + c];
                        (!v.is_zero()).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        Ok(Self { dim, rows })
    }

    /// Builds from a real row-major matrix.
    pub fn from_real(dim: usize, entries: &[T]) -> Result<Self> {
        let c: Vec<_> = entries
            .iter()
            .map(|&x| Complex::new(x, T::zero()))
            .collect();
        Self::from_dense(dim, &c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.rows[row]
            .iter()
            .find(|(c, _)| *c == col)
            .map(|(_, v)| *v)
            .unwrap_or_else(Complex::zero)
    }
}

/// Hermitian operator over a [`ModeRegister`], dense row-major storage.
///
/// Conditioned states are carried unnormalized, so the trace may be below one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T> {
    register: ModeRegister,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityOperator<T> {
    pub fn from_matrix(register: ModeRegister, data: Vec<Complex<T>>) -> Result<Self> {
        let dim = register.dim();
        if data.len() != dim * dim {
            return Err(Error::OperatorShape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { register, data })
    }

    /// `|psi><psi|` normalized to unit trace from sparse amplitudes.
    pub fn make_pure<I>(register: ModeRegister, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Complex<T>)>,
    {
        let dim = register.dim();
        let mut psi = vec![Complex::<T>::zero(); dim];
        for (idx, amp) in amplitudes {
            if idx >= dim {
                return Err(Error::IndexOutOfRange { index: idx, dim });
            }
            psi[idx] = psi[idx] + amp;
        }
        let norm_sq = psi.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        if norm_sq <= T::zero() {
            return Err(Error::ZeroNorm);
        }
        let mut data = vec![Complex::zero(); dim * dim];
        for i in 0..dim {
            if psi[i].is_zero() {
                continue;
            }
            for j in 0..dim {
                data[i * dim + j] = psi[i] * psi[j].conj() / norm_sq;
            }
        }
        Ok(Self { register, data })
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    /// Row-major matrix entries.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> T {
        let dim = self.dim();
        (0..dim).fold(T::zero(), |acc, i| acc + self.data[i * dim + i].re)
    }

    /// `Tr(rho^2)` of the operator as stored.
    pub fn purity(&self) -> T {
        // Hermitian, so Tr(rho^2) = sum |rho_ij|^2.
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Diagonal entry at the given per-mode occupations.
    pub fn population(&self, digits: &[usize]) -> Result<T> {
        let i = self.register.index_of(digits)?;
        Ok(self.get(i, i).re)
    }

    /// Matrix element between two occupation patterns.
    pub fn element(&self, row: &[usize], col: &[usize]) -> Result<Complex<T>> {
        Ok(self.get(self.register.index_of(row)?, self.register.index_of(col)?))
    }

    /// `<n>` of a bosonic mode (or the dark-state population of an atom).
    pub fn mean_occupation(&self, label: &str) -> Result<T> {
        let pos = self.register.position(label)?;
        let dim = self.dim();
        let mut acc = T::zero();
        for i in 0..dim {
            let n = self.register.digits(i)[pos];
            acc = acc + T::from_usize(n).unwrap() * self.data[i * dim + i].re;
        }
        Ok(acc)
    }

    /// `max_ij |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let dim = self.dim();
        let mut worst = T::zero();
        for i in 0..dim {
            for j in i..dim {
                let d = (self.data[i * dim + j] - self.data[j * dim + i].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            register: self.register.clone(),
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Unit-trace copy plus the original trace.
    pub fn normalize(&self) -> Result<(Self, T)> {
        let tr = self.trace();
        if tr <= T::zero() {
            return Err(Error::ZeroProbability("normalize"));
        }
        Ok((self.scale(T::one() / tr), tr))
    }

    /// Kronecker product; the register is `self ++ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let register = self.register.concat(&other.register)?;
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![Complex::zero(); dim * dim];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.data[ia * da + ja];
                if a.is_zero() {
                    continue;
                }
                for ib in 0..db {
                    let row = (ia * db + ib) * dim + ja * db;
                    let brow = &other.data[ib * db..(ib + 1) * db];
                    for (jb, b) in brow.iter().enumerate() {
                        data[row + jb] = a * b;
                    }
                }
            }
        }
        Ok(Self { register, data })
    }

    /// Traces out the named modes.
    pub fn partial_trace(&self, drop: &[&str]) -> Result<Self> {
        let positions = drop
            .iter()
            .map(|l| self.register.position(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.trace_positions_selected(&positions, |_| true))
    }

    /// Traces out `drop` positions keeping only the diagonal blocks whose
    /// occupations of the dropped modes satisfy `keep`. With `keep` always true
    /// this is the ordinary partial trace; with a predicate it is the reduced
    /// state after a projective measurement diagonal in the Fock basis.
    pub(crate) fn trace_positions_selected<F>(&self, drop: &[usize], keep: F) -> Self
    where
        F: Fn(&[usize]) -> bool,
    {
        let reduced = self.register.without_positions(drop);
        let rdim = reduced.dim();
        let dims = self.register.dims();
        let strides = self.register.strides();
        let kept_positions: Vec<usize> = (0..dims.len()).filter(|k| !drop.contains(k)).collect();

        // Enumerate the occupation patterns of the dropped modes that survive
        // the predicate, as flat offsets.
        let drop_dims: Vec<usize> = drop.iter().map(|&k| dims[k]).collect();
        let n_drop: usize = drop_dims.iter().product();
        let mut offsets = Vec::with_capacity(n_drop);
        let mut digits = vec![0usize; drop.len()];
        for mut flat in 0..n_drop {
            for k in (0..drop.len()).rev() {
                digits[k] = flat % drop_dims[k];
                flat /= drop_dims[k];
            }
            if keep(&digits) {
                offsets.push(
                    drop.iter()
                        .zip(&digits)
                        .map(|(&p, &d)| d * strides[p])
                        .sum::<usize>(),
                );
            }
        }

        // Full-register offset of every reduced basis index.
        let base: Vec<usize> = (0..rdim)
            .map(|r| {
                let mut rem = r;
                let mut off = 0;
                for &p in kept_positions.iter().rev() {
                    off += (rem % dims[p]) * strides[p];
                    rem /= dims[p];
                }
                off
            })
            .collect();

        let dim = self.dim();
        let mut data = vec![Complex::zero(); rdim * rdim];
        for (r, &br) in base.iter().enumerate() {
            for (c, &bc) in base.iter().enumerate() {
                let mut acc = Complex::zero();
                for &o in &offsets {
                    acc = acc + self.data[(br + o) * dim + bc + o];
                }
                data[r * rdim + c] = acc;
            }
        }
        Self {
            register: reduced,
            data,
        }
    }

    /// `K rho K^dagger` for an operator `K` on the listed modes (in that order).
    pub fn apply_local(&self, modes: &[&str], op: &LocalOperator<T>) -> Result<Self> {
        let layout = LocalLayout::new(&self.register, modes)?;
        if op.dim != layout.local_dim {
            return Err(Error::OperatorShape {
                expected: layout.local_dim,
                got: op.dim,
            });
        }
        Ok(Self {
            register: self.register.clone(),
            data: layout.conjugate(&self.data, op),
        })
    }

    /// `sum_k K_k rho K_k^dagger`.
    pub fn apply_kraus(&self, modes: &[&str], ops: &[LocalOperator<T>]) -> Result<Self> {
        let layout = LocalLayout::new(&self.register, modes)?;
        let mut data = vec![Complex::zero(); self.data.len()];
        for op in ops {
            if op.dim != layout.local_dim {
                return Err(Error::OperatorShape {
                    expected: layout.local_dim,
                    got: op.dim,
                });
            }
            for (acc, v) in data.iter_mut().zip(layout.conjugate(&self.data, op)) {
                *acc = *acc + v;
            }
        }
        Ok(Self {
            register: self.register.clone(),
            data,
        })
    }

    /// Smallest eigenvalue of the stored matrix.
    pub fn min_eigenvalue(&self) -> T
    where
        T: nalgebra::RealField,
    {
        let dim = self.dim();
        crate::scalar::min_hermitian_eigenvalue(nalgebra::DMatrix::from_row_slice(
            dim, dim, &self.data,
        ))
    }

    /// Checks Hermiticity, positivity and the trace bound at the project tolerances.
    pub fn check_physical(&self) -> std::result::Result<(), String>
    where
        T: nalgebra::RealField,
    {
        let herm = self.hermiticity_defect().to_f64().unwrap();
        if herm > crate::HERMITICITY_TOL {
            return Err(format!("hermiticity defect {herm:e}"));
        }
        let tr = num_traits::ToPrimitive::to_f64(&self.trace()).unwrap();
        if !(-crate::TRACE_TOL..=1.0 + crate::TRACE_TOL).contains(&tr) {
            return Err(format!("trace {tr} outside [0, 1]"));
        }
        let eig = num_traits::ToPrimitive::to_f64(&self.min_eigenvalue()).unwrap();
        if eig < -crate::PSD_TOL {
            return Err(format!("minimum eigenvalue {eig:e}"));
        }
        Ok(())
    }
}

/// Index bookkeeping for splitting a register into (local, rest) factors.
struct LocalLayout {
    dim: usize,
    local_dim: usize,
    /// For every flat index: (local index, full-register offset with the local digits zeroed).
    split: Vec<(usize, usize)>,
    /// Full-register offset contributed by each local index.
    local_offset: Vec<usize>,
}

impl LocalLayout {
    fn new(register: &ModeRegister, modes: &[&str]) -> Result<Self> {
        let positions = modes
            .iter()
            .map(|l| register.position(l))
            .collect::<Result<Vec<_>>>()?;
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].contains(p) {
                return Err(Error::LabelCollision(modes[i].to_string()));
            }
        }
        let dims = register.dims();
        let strides = register.strides();
        let local_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
        let local_dim: usize = local_dims.iter().product();

        let local_offset: Vec<usize> = (0..local_dim)
            .map(|mut l| {
                let mut off = 0;
                for k in (0..positions.len()).rev() {
                    off += (l % local_dims[k]) * strides[positions[k]];
                    l /= local_dims[k];
                }
                off
            })
            .collect();

        let dim = register.dim();
        let split = (0..dim)
            .map(|i| {
                let mut l = 0;
                for &p in &positions {
                    l = l * dims[p] + (i / strides[p]) % dims[p];
                }
                (l, i - local_offset[l])
            })
            .collect();
        Ok(Self {
            dim,
            local_dim,
            split,
            local_offset,
        })
    }

    fn conjugate<T: Real>(&self, rho: &[Complex<T>], op: &LocalOperator<T>) -> Vec<Complex<T>> {
        let dim = self.dim;
        // (K (x) I) rho
        let mut left = vec![Complex::<T>::zero(); dim * dim];
        for i in 0..dim {
            let (l, rest) = self.split[i];
            let row = &mut left[i * dim..(i + 1) * dim];
            for &(lin, k) in &op.rows[l] {
                let src = (rest + self.local_offset[lin]) * dim;
                for (dst, v) in row.iter_mut().zip(&rho[src..src + dim]) {
                    *dst = *dst + k * v;
                }
            }
        }
        // (...) (K (x) I)^dagger
        let mut out = vec![Complex::<T>::zero(); dim * dim];
        for j in 0..dim {
            let (l, rest) = self.split[j];
            for &(lin, k) in &op.rows[l] {
                let kc = k.conj();
                let src_col = rest + self.local_offset[lin];
                for i in 0..dim {
                    let v = left[i * dim + src_col];
                    if !v.is_zero() {
                        out[i * dim + j] = out[i * dim + j] + v * kc;
                    }
                }
            }
        }
        out
    }
}
