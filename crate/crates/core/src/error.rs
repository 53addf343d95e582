use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude map has zero norm")]
    ZeroNorm,

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("duplicate mode label `{0}`")]
    LabelCollision(String),

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("mode `{0}` is not bosonic")]
    NotBosonic(String),

    #[error("mode `{0}` is not an atomic qubit")]
    NotAtomic(String),

    #[error("bosonic mode `{0}` needs a cutoff of at least 1")]
    InvalidCutoff(String),

    #[error("beam splitter on `{mode_i}`/`{mode_j}` would need {photons} photons in one output mode, cutoff is {cutoff}")]
    CutoffOverflow {
        mode_i: String,
        mode_j: String,
        photons: usize,
        cutoff: usize,
    },

    #[error("{name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operator dimension {got} does not match local dimension {expected}")]
    OperatorShape { expected: usize, got: usize },

    #[error("conditioning branch `{0}` has zero probability")]
    ZeroProbability(&'static str),

    #[error("normalization `{0}` vanishes")]
    VanishingNormalization(&'static str),

    #[error("closed form is outside its validity region: {0}")]
    OutsideValidity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks that `value` is a probability.
pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
