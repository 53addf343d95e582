use std::fmt;

use crate::error::{Error, Result};

/// Computational basis index of the bright atomic state.
pub const BRIGHT: usize = 0;
/// Computational basis index of the dark atomic state.
pub const DARK: usize = 1;

/// What kind of degree of freedom a mode is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Two-level atomic qubit with basis `{B, D}` (indices [`BRIGHT`], [`DARK`]).
    AtomicQubit,
    /// Bosonic mode truncated to `|0>..|cutoff>`.
    Bosonic { cutoff: usize },
}

/// A labelled mode of a composite register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpec {
    label: String,
    kind: ModeKind,
}

impl ModeSpec {
    pub fn atom(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: ModeKind::AtomicQubit,
        }
    }

    pub fn bosonic(label: impl Into<String>, cutoff: usize) -> Result<Self> {
        let label = label.into();
        if cutoff < 1 {
            return Err(Error::InvalidCutoff(label));
        }
        Ok(Self {
            label,
            kind: ModeKind::Bosonic { cutoff },
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ModeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ModeKind::AtomicQubit => 2,
            ModeKind::Bosonic { cutoff } => cutoff + 1,
        }
    }

    pub fn is_bosonic(&self) -> bool {
        matches!(self.kind, ModeKind::Bosonic { .. })
    }
}

/// Ordered list of modes. Basis indices are row-major over the declared order:
/// the first mode is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModeRegister {
    modes: Vec<ModeSpec>,
}

impl ModeRegister {
    pub fn new(modes: Vec<ModeSpec>) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if let ModeKind::Bosonic { cutoff: 0 } = m.kind {
                return Err(Error::InvalidCutoff(m.label.clone()));
            }
            if modes[..i].iter().any(|o| o.label == m.label) {
                return Err(Error::LabelCollision(m.label.clone()));
            }
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Total Hilbert-space dimension (1 for the empty register).
    pub fn dim(&self) -> usize {
        self.modes.iter().map(ModeSpec::dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.modes.iter().map(ModeSpec::dim).collect()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn mode(&self, label: &str) -> Result<&ModeSpec> {
        Ok(&self.modes[self.position(label)?])
    }

    /// Row-major stride of every mode.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.modes.len()];
        for k in (0..self.modes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.modes[k + 1].dim();
        }
        strides
    }

    /// Per-mode occupation digits of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.modes.len()];
        for k in (0..self.modes.len()).rev() {
            let d = self.modes[k].dim();
            out[k] = index % d;
            index /= d;
        }
        out
    }

    /// Flat basis index of per-mode occupations.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.modes.len() {
            return Err(Error::OperatorShape {
                expected: self.modes.len(),
                got: digits.len(),
            });
        }
        let mut idx = 0;
        for (m, &d) in self.modes.iter().zip(digits) {
            if d >= m.dim() {
                return Err(Error::IndexOutOfRange {
                    index: d,
                    dim: m.dim(),
                });
            }
            idx = idx * m.dim() + d;
        }
        Ok(idx)
    }

    /// Concatenation `self ++ other`; labels must be disjoint.
    pub fn concat(&self, other: &ModeRegister) -> Result<Self> {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Self::new(modes)
    }

    /// Register with the given positions removed; survivors keep their order.
    pub(crate) fn without_positions(&self, drop: &[usize]) -> Self {
        Self {
            modes: self
                .modes
                .iter()
                .enumerate()
                .filter(|(k, _)| !drop.contains(k))
                .map(|(_, m)| m.clone())
                .collect(),
        }
    }
}

impl fmt::Display for ModeRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.modes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", m.label, m.dim())?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> ModeRegister {
        ModeRegister::new(vec![
            ModeSpec::atom("a"),
            ModeSpec::bosonic("p", 3).unwrap(),
            ModeSpec::bosonic("q", 2).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn dimension_is_product_of_modes() {
        assert_eq!(reg().dim(), 2 * 4 * 3);
        assert_eq!(reg().strides(), vec![12, 3, 1]);
    }

    #[test]
    fn digits_round_trip() {
        let r = reg();
        for i in 0..r.dim() {
            assert_eq!(r.index_of(&r.digits(i)).unwrap(), i);
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = ModeRegister::new(vec![ModeSpec::atom("x"), ModeSpec::atom("x")]).unwrap_err();
        assert_eq!(err, Error::LabelCollision("x".into()));
    }

    #[test]
    fn zero_cutoff_rejected() {
        assert!(ModeSpec::bosonic("b", 0).is_err());
    }

    #[test]
    fn removing_modes_keeps_order() {
        let r = reg().without_positions(&[1]);
        let labels: Vec<_> = r.modes().iter().map(|m| m.label()).collect();
        assert_eq!(labels, vec!["a", "q"]);
    }
}
