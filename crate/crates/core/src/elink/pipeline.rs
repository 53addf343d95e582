//! Elementary-link pipelines evaluated in the truncated Fock space.
//!
//! The hybrid link is computed in stages: the remote swap acts on the
//! four-mode SPDC register alone, and each loading swap is applied to the
//! live register of one side before the next atom is brought in. The live
//! dimension never exceeds 128.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::fock::{
    beam_splitter, condition_single_click, loss_channel, BeamSplitterConvention, ClickPattern,
    DensityOperator, DetectorModel, LocalOperator, ModeRegister, ModeSpec, BRIGHT, CUTOFF,
};
use crate::scalar::Real;
use crate::states::{atom_photon_on, joint_spdc};
use crate::two_qubit::TwoQubitState;

/// Photon-loss probabilities of one elementary link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    /// Loss of each arm between a source and the remote swapper.
    pub remote: f64,
    /// Memory readout loss on each heralded idler mode.
    pub memory_readout: f64,
    /// Frequency-conversion loss on each atomic photon before loading.
    pub conversion: f64,
}

impl LossParams {
    /// Remote loss `er` and a shared local loss `el`.
    pub fn symmetric(er: f64, el: f64) -> Result<Self> {
        Self::new(er, el, el)
    }

    pub fn new(remote: f64, memory_readout: f64, conversion: f64) -> Result<Self> {
        check_probability("epsilon_r", remote)?;
        check_probability("memory_readout", memory_readout)?;
        check_probability("conversion", conversion)?;
        Ok(Self {
            remote,
            memory_readout,
            conversion,
        })
    }

    /// The shared local loss, if readout and conversion agree.
    pub fn local(&self) -> Option<f64> {
        (self.memory_readout == self.conversion).then_some(self.memory_readout)
    }
}

/// How every swapper in a pipeline detects and post-selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SwapConfig {
    pub detector: DetectorModel,
    pub pattern: ClickPattern,
    pub convention: BeamSplitterConvention,
}

impl SwapConfig {
    pub fn with_detector(detector: DetectorModel) -> Self {
        Self {
            detector,
            ..Self::default()
        }
    }
}

/// A heralded elementary link and its stage probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ElinkResult<T> {
    pub state: TwoQubitState<T>,
    /// Heralding probability of the remote swap per emitted mode pair.
    pub p_remote_click: T,
    /// Probability that both loading swaps click, given the heralded pair.
    pub p_load: T,
    /// `p_remote_click * p_load`.
    pub p_el: T,
}

fn swap<T: Real>(
    state: &DensityOperator<T>,
    a: &str,
    b: &str,
    cfg: &SwapConfig,
    branch: &'static str,
) -> Result<(DensityOperator<T>, T)> {
    let mixed = beam_splitter(state, a, b, cfg.convention)?;
    let (cond, p) = condition_single_click(&mixed, a, b, cfg.detector, cfg.pattern)?;
    if cond.trace() <= T::zero() {
        return Err(Error::ZeroProbability(branch));
    }
    let (normed, _) = cond.normalize()?;
    Ok((normed, p))
}

fn param<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite parameter")
}

/// Heralded memory pair on `(i1, i2)` after readout loss, with the remote
/// heralding probability.
pub fn heralded_qm_pair<T: Real>(
    lambda: T,
    loss: &LossParams,
    cfg: &SwapConfig,
) -> Result<(DensityOperator<T>, T)> {
    let er = param::<T>(loss.remote);
    let mut st = joint_spdc(lambda)?;
    st = loss_channel(&st, "s1", er)?;
    st = loss_channel(&st, "s2", er)?;
    let (mut pair, p) = swap(&st, "s1", "s2", cfg, "remote swap")?;
    let el = param::<T>(loss.memory_readout);
    pair = loss_channel(&pair, "i1", el)?;
    pair = loss_channel(&pair, "i2", el)?;
    Ok((pair, p))
}

/// Conversion loss on `photon`, then the loading swap of `photon` (A role)
/// against the stored `idler` (B role).
pub fn loading_swap<T: Real>(
    state: &DensityOperator<T>,
    photon: &str,
    idler: &str,
    conversion: T,
    cfg: &SwapConfig,
) -> Result<(DensityOperator<T>, T)> {
    let lossy = loss_channel(state, photon, conversion)?;
    swap(&lossy, photon, idler, cfg, "loading swap")
}

fn load_both_sides<T: Real>(
    pair: DensityOperator<T>,
    q: T,
    loss: &LossParams,
    cfg: &SwapConfig,
) -> Result<(DensityOperator<T>, T)> {
    let conv = param::<T>(loss.conversion);
    let mut st = pair;
    let mut p_load = T::one();
    for side in ["1", "2"] {
        let (atom, photon, idler) = (format!("a{side}"), format!("p{side}"), format!("i{side}"));
        st = st.tensor(&atom_photon_on(q, &atom, &photon)?)?;
        let (next, p) = loading_swap(&st, &photon, &idler, conv, cfg)?;
        st = next;
        p_load = p_load * p;
    }
    Ok((st, p_load))
}

/// The hybrid elementary link: SPDC remote swap, memory readout and loading
/// of both atoms.
pub fn hybrid_raw_elink<T: Real>(
    q: T,
    lambda: T,
    loss: &LossParams,
    cfg: &SwapConfig,
) -> Result<ElinkResult<T>> {
    let (pair, p_remote) = heralded_qm_pair(lambda, loss, cfg)?;
    load_heralded_pair(&pair, p_remote, q, loss, cfg)
}

/// Loading stage of the hybrid link for a pair from [`heralded_qm_pair`].
/// Lets callers scanning `q` reuse one remote stage.
pub fn load_heralded_pair<T: Real>(
    pair: &DensityOperator<T>,
    p_remote: T,
    q: T,
    loss: &LossParams,
    cfg: &SwapConfig,
) -> Result<ElinkResult<T>> {
    check_probability("q", q.to_f64().unwrap_or(f64::NAN))?;
    let (atoms, p_load) = load_both_sides(pair.clone(), q, loss, cfg)?;
    Ok(ElinkResult {
        state: TwoQubitState::from_operator(&atoms)?,
        p_remote_click: p_remote,
        p_load,
        p_el: p_remote * p_load,
    })
}

/// The atom-based elementary link: two atom-photon sources interfered at a
/// midpoint swapper, each photon suffering `loss.remote`.
pub fn atom_elink<T: Real>(q: T, loss: &LossParams, cfg: &SwapConfig) -> Result<ElinkResult<T>> {
    let er = param::<T>(loss.remote);
    let mut st = atom_photon_on(q, "a1", "p1")?.tensor(&atom_photon_on(q, "a2", "p2")?)?;
    st = loss_channel(&st, "p1", er)?;
    st = loss_channel(&st, "p2", er)?;
    let (atoms, p) = swap(&st, "p1", "p2", cfg, "atom swap")?;
    Ok(ElinkResult {
        state: TwoQubitState::from_operator(&atoms)?,
        p_remote_click: p,
        p_load: T::one(),
        p_el: p,
    })
}

/// Emission isometry of a re-pumped atom on `(atom, photon)`: a bright atom
/// with an empty photon mode emits one photon, a dark atom stays silent.
fn emission<T: Real>() -> LocalOperator<T> {
    let d = CUTOFF + 1;
    let dim = 2 * d;
    let mut u = vec![T::zero(); dim * dim];
    for k in 0..dim {
        u[k * dim + k] = T::one();
    }
    let (b0, b1) = (BRIGHT * d, BRIGHT * d + 1);
    u[b0 * dim + b0] = T::zero();
    u[b1 * dim + b1] = T::zero();
    u[b1 * dim + b0] = T::one();
    u[b0 * dim + b1] = T::one();
    LocalOperator::from_real(dim, &u).expect("square by construction")
}

/// One round of the re-emission trick applied to a heralded link.
///
/// Both atoms are flipped and re-pumped, and their photons are loaded
/// against a freshly heralded memory pair. The output is left in the flipped
/// frame; `p_remote_click` and `p_load` refer to the retry.
pub fn re_trick<T: Real>(
    raw: &TwoQubitState<T>,
    lambda: T,
    loss: &LossParams,
    cfg: &SwapConfig,
) -> Result<ElinkResult<T>> {
    let flipped = crate::qproc::pauli_x_both(raw);
    let atoms_reg = ModeRegister::new(vec![ModeSpec::atom("a1"), ModeSpec::atom("a2")])?;
    let data: Vec<Complex<T>> = flipped.matrix().iter().flatten().copied().collect();
    let atoms = DensityOperator::from_matrix(atoms_reg, data)?;
    let vacuum = |label: &str| -> Result<DensityOperator<T>> {
        let reg = ModeRegister::new(vec![ModeSpec::bosonic(label, CUTOFF)?])?;
        DensityOperator::make_pure(reg, [(0, Complex::new(T::one(), T::zero()))])
    };
    let mut st = atoms.tensor(&vacuum("p1")?)?.tensor(&vacuum("p2")?)?;
    let u = emission::<T>();
    st = st.apply_local(&["a1", "p1"], &u)?;
    st = st.apply_local(&["a2", "p2"], &u)?;

    let (pair, p_remote) = heralded_qm_pair(lambda, loss, cfg)?;
    st = st.tensor(&pair)?;
    let conv = param::<T>(loss.conversion);
    let mut p_load = T::one();
    for side in ["1", "2"] {
        let (next, p) = loading_swap(&st, &format!("p{side}"), &format!("i{side}"), conv, cfg)?;
        st = next;
        p_load = p_load * p;
    }
    if st.trace().is_zero() {
        return Err(Error::ZeroProbability("re-emission"));
    }
    Ok(ElinkResult {
        state: TwoQubitState::from_operator(&st)?,
        p_remote_click: p_remote,
        p_load,
        p_el: p_remote * p_load,
    })
}
