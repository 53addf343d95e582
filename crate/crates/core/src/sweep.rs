//! Brightness optimization and scenario sweeps.
//!
//! Grid points are evaluated in parallel; every table is assembled in a fixed
//! order so output does not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elink::{
    atom_elink, heralded_qm_pair, load_heralded_pair, ElinkResult, LossParams, Strategy, SwapConfig,
};
use crate::error::{Error, Result};
use crate::qproc::chain_state;
use crate::rates::{
    atom_timing, distill_link, edr_thresholded, hybrid_timing, secret_key_rate, HardwareParams,
    KeyRateResult, ProbabilityBreakdown, TimingBreakdown,
};
use crate::two_qubit::TwoQubitState;

/// Largest hop count a scenario may request.
pub const MAX_HOPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Atom,
    Hybrid,
}

impl Architecture {
    pub fn label(self) -> &'static str {
        match self {
            Architecture::Atom => "atom",
            Architecture::Hybrid => "hybrid",
        }
    }
}

/// A named pair of local efficiencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regime {
    pub name: String,
    pub eta_qfc: f64,
    pub eta_qm: f64,
}

impl Regime {
    pub fn new(name: &str, eta_qfc: f64, eta_qm: f64) -> Self {
        Self {
            name: name.to_string(),
            eta_qfc,
            eta_qm,
        }
    }

    pub fn idealized() -> Self {
        Self::new("idealized", 1.0, 1.0)
    }

    pub fn near_term() -> Self {
        Self::new("near-term", 0.8, 0.8)
    }

    pub fn current() -> Self {
        Self::new("current", 0.5, 0.5)
    }

    pub fn defaults() -> Vec<Self> {
        vec![Self::idealized(), Self::near_term(), Self::current()]
    }

    /// `params` with this regime's efficiencies.
    pub fn apply(&self, params: &HardwareParams) -> HardwareParams {
        HardwareParams {
            eta_qfc: self.eta_qfc,
            eta_qm: self.eta_qm,
            ..params.clone()
        }
    }
}

/// One repeater configuration to sweep over distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub architecture: Architecture,
    /// Must distill (`epl` or `pnr+epl`): the rate model counts two links per
    /// distillation attempt.
    pub strategy: Strategy,
    pub hops: usize,
    pub regime: Regime,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !self.strategy.distills() {
            return Err(Error::InvalidParameter {
                name: "strategy",
                reason: format!(
                    "rate scenarios need a distilling strategy (epl or pnr+epl), got {}",
                    self.strategy
                ),
            });
        }
        if self.hops > MAX_HOPS {
            return Err(Error::InvalidParameter {
                name: "hops",
                reason: format!("{} exceeds {MAX_HOPS}", self.hops),
            });
        }
        Ok(())
    }

    /// Number of QPUs in the chain: the two end nodes plus one per hop.
    pub fn n_qpu(&self) -> usize {
        self.hops + 2
    }

    /// Spacing between neighbouring QPUs.
    pub fn d_qpu(&self, d_end_km: f64) -> f64 {
        d_end_km / (self.hops + 1) as f64
    }
}

/// Brightness grids. The atom architecture ignores `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub q: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        let g: Vec<f64> = (1..=49).map(|k| k as f64 / 50.0).collect();
        Self {
            q: g.clone(),
            lambda: g,
        }
    }
}

impl Grids {
    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("q_grid", &self.q), ("lambda_grid", &self.lambda)] {
            if g.is_empty() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "empty grid".into(),
                });
            }
            if let Some(v) = g.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} is outside (0, 1)"),
                });
            }
        }
        Ok(())
    }

    fn sorted(v: &[f64]) -> Vec<f64> {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }
}

/// `n` points log-spaced over `[lo, hi]`.
pub fn log_distances(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// The default distance grid: 20 log-spaced points over 10-200 km.
pub fn default_distances() -> Vec<f64> {
    log_distances(10.0, 200.0, 20)
}

/// What a brightness search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    KeyRate,
    Edr,
}

/// A raw link at one brightness point, `None` where heralding is impossible.
#[derive(Debug, Clone)]
pub struct LinkPoint {
    pub q: f64,
    pub lambda: f64,
    pub link: Option<ElinkResult<f64>>,
}

fn zero_to_none<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::ZeroProbability(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Raw elementary links over the brightness grid, sorted by `(q, lambda)`.
pub fn link_grid(
    arch: Architecture,
    strategy: Strategy,
    params: &HardwareParams,
    d_qpu_km: f64,
    grids: &Grids,
    swap: &SwapConfig,
) -> Result<Vec<LinkPoint>> {
    let cfg = SwapConfig {
        detector: strategy.detector(),
        ..*swap
    };
    let qs = Grids::sorted(&grids.q);
    match arch {
        Architecture::Atom => {
            let loss = params.atom_loss(d_qpu_km)?;
            qs.par_iter()
                .map(|&q| {
                    Ok(LinkPoint {
                        q,
                        lambda: 0.0,
                        link: zero_to_none(atom_elink(q, &loss, &cfg))?,
                    })
                })
                .collect()
        }
        Architecture::Hybrid => {
            let loss = params.hybrid_loss(d_qpu_km)?;
            let lambdas = Grids::sorted(&grids.lambda);
            let pairs: Vec<_> = lambdas
                .par_iter()
                .map(|&l| zero_to_none(heralded_qm_pair(l, &loss, &cfg)))
                .collect::<Result<_>>()?;
            let jobs: Vec<(f64, usize)> = qs
                .iter()
                .flat_map(|&q| (0..lambdas.len()).map(move |k| (q, k)))
                .collect();
            jobs.par_iter()
                .map(|&(q, k)| {
                    let link = match &pairs[k] {
                        Some((pair, p)) => {
                            zero_to_none(load_heralded_pair(pair, *p, q, &loss, &cfg))?
                        }
                        None => None,
                    };
                    Ok(LinkPoint {
                        q,
                        lambda: lambdas[k],
                        link,
                    })
                })
                .collect()
        }
    }
}

/// Rates of a chain built from one raw link.
#[derive(Debug, Clone)]
pub struct ChainPoint {
    pub timing: TimingBreakdown,
    pub probabilities: ProbabilityBreakdown,
    pub end_state: TwoQubitState<f64>,
    pub key: KeyRateResult,
    pub edr: f64,
}

/// Distills the link, merges `hops + 1` copies and evaluates the rates.
/// `None` when the distilled link can never be produced.
pub fn evaluate_chain(
    arch: Architecture,
    params: &HardwareParams,
    d_qpu_km: f64,
    hops: usize,
    link: &ElinkResult<f64>,
) -> Result<Option<ChainPoint>> {
    let n_qpu = hops + 2;
    let timed = match arch {
        Architecture::Atom => atom_timing(params, d_qpu_km, n_qpu, link),
        Architecture::Hybrid => hybrid_timing(params, d_qpu_km, n_qpu, link),
    };
    let Some((timing, probabilities)) = zero_to_none(timed)? else {
        return Ok(None);
    };
    let distilled = distill_link(link)?;
    let end_state = chain_state(&distilled.state, hops);
    let r_rep = timing.r_rep();
    let key = secret_key_rate(r_rep, &end_state);
    let edr = edr_thresholded(r_rep, &end_state, params.f_threshold);
    Ok(Some(ChainPoint {
        timing,
        probabilities,
        end_state,
        key,
        edr,
    }))
}

/// Result of a brightness search.
#[derive(Debug, Clone)]
pub struct BrightnessOptimum {
    pub q: f64,
    pub lambda: f64,
    pub value: f64,
    /// Every grid point scored zero; `(q, lambda)` is then the smallest point.
    pub all_zero: bool,
    pub chain: Option<ChainPoint>,
}

fn score(objective: Objective, c: &Option<ChainPoint>) -> f64 {
    match (objective, c) {
        (_, None) => 0.0,
        (Objective::KeyRate, Some(c)) => c.key.r_key,
        (Objective::Edr, Some(c)) => c.edr,
    }
}

/// Argmax over `(q, lambda)`-sorted candidates; ties keep the earliest, i.e.
/// the smallest `q`, then the smallest `lambda`.
pub fn pick_optimum(
    candidates: Vec<(f64, f64, Option<ChainPoint>)>,
    objective: Objective,
) -> Result<BrightnessOptimum> {
    let mut candidates = candidates;
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in candidates.iter().enumerate() {
        let v = score(objective, &c.2);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    let (k, value) = best.ok_or(Error::InvalidParameter {
        name: "grid",
        reason: "no brightness candidates".into(),
    })?;
    let (q, lambda, chain) = candidates.swap_remove(k);
    Ok(BrightnessOptimum {
        q,
        lambda,
        value,
        all_zero: value <= 0.0,
        chain,
    })
}

fn chain_candidates(
    arch: Architecture,
    params: &HardwareParams,
    d_qpu_km: f64,
    hops: usize,
    links: &[LinkPoint],
) -> Result<Vec<(f64, f64, Option<ChainPoint>)>> {
    links
        .par_iter()
        .map(|p| {
            let chain = match &p.link {
                Some(l) => evaluate_chain(arch, params, d_qpu_km, hops, l)?,
                None => None,
            };
            Ok((p.q, p.lambda, chain))
        })
        .collect()
}

/// Exhaustive brightness search for one scenario at one end-to-end distance.
pub fn optimize_brightness(
    scenario: &Scenario,
    params: &HardwareParams,
    d_end_km: f64,
    grids: &Grids,
    swap: &SwapConfig,
    objective: Objective,
) -> Result<BrightnessOptimum> {
    scenario.validate()?;
    grids.validate()?;
    let params = scenario.regime.apply(params);
    let d_qpu = scenario.d_qpu(d_end_km);
    let links = link_grid(
        scenario.architecture,
        scenario.strategy,
        &params,
        d_qpu,
        grids,
        swap,
    )?;
    let cands = chain_candidates(scenario.architecture, &params, d_qpu, scenario.hops, &links)?;
    pick_optimum(cands, objective)
}

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub arch: Architecture,
    pub strategy: Strategy,
    pub hops: usize,
    pub regime: String,
    pub d_km: f64,
    pub n_temp: usize,
    pub n_freq: usize,
    pub q: f64,
    /// Zero for the atom architecture.
    pub lambda: f64,
    pub r_rep: f64,
    pub fidelity: f64,
    pub r_key: f64,
    pub edr: f64,
    pub p_el_d: f64,
    pub all_zero: bool,
}

fn row(
    scenario: &Scenario,
    params: &HardwareParams,
    d_end_km: f64,
    opt: &BrightnessOptimum,
) -> SweepRow {
    let c = opt.chain.as_ref();
    SweepRow {
        arch: scenario.architecture,
        strategy: scenario.strategy,
        hops: scenario.hops,
        regime: scenario.regime.name.clone(),
        d_km: d_end_km,
        n_temp: params.n_temp,
        n_freq: params.n_freq,
        q: opt.q,
        lambda: opt.lambda,
        r_rep: c.map_or(0.0, |c| c.key.r_rep),
        fidelity: c.map_or(0.0, |c| c.key.fidelity),
        r_key: c.map_or(0.0, |c| c.key.r_key),
        edr: c.map_or(0.0, |c| c.edr),
        p_el_d: c.map_or(0.0, |c| c.probabilities.p_el_d),
        all_zero: opt.all_zero,
    }
}

fn distance_table(
    scenarios: &[Scenario],
    params: &HardwareParams,
    d_points: &[f64],
    grids: &Grids,
    swap: &SwapConfig,
    objective: Objective,
) -> Result<Vec<SweepRow>> {
    if scenarios.is_empty() {
        return Err(Error::InvalidParameter {
            name: "scenarios",
            reason: "empty scenario list".into(),
        });
    }
    for s in scenarios {
        s.validate()?;
    }
    let jobs: Vec<(usize, f64)> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(k, _)| d_points.iter().map(move |&d| (k, d)))
        .collect();
    jobs.par_iter()
        .map(|&(k, d)| {
            let s = &scenarios[k];
            let opt = optimize_brightness(s, params, d, grids, swap, objective)?;
            Ok(row(s, params, d, &opt))
        })
        .collect()
}

/// Brightness-optimized secret-key rates per scenario and distance, in
/// scenario order then ascending distance.
pub fn keyrate_vs_distance(
    scenarios: &[Scenario],
    params: &HardwareParams,
    d_points: &[f64],
    grids: &Grids,
    swap: &SwapConfig,
) -> Result<Vec<SweepRow>> {
    let mut d = d_points.to_vec();
    d.sort_by(f64::total_cmp);
    distance_table(scenarios, params, &d, grids, swap, Objective::KeyRate)
}

/// Brightness-optimized thresholded entanglement-distribution rates, using
/// `params.f_threshold`.
pub fn edr_vs_distance(
    scenarios: &[Scenario],
    params: &HardwareParams,
    d_points: &[f64],
    grids: &Grids,
    swap: &SwapConfig,
) -> Result<Vec<SweepRow>> {
    let mut d = d_points.to_vec();
    d.sort_by(f64::total_cmp);
    distance_table(scenarios, params, &d, grids, swap, Objective::Edr)
}

/// All `(n_temp, n_freq)` with `n_temp * n_freq = n_mul` and `n_temp >= 2`,
/// by ascending `n_temp`.
pub fn divisor_pairs(n_mul: usize) -> Vec<(usize, usize)> {
    (2..=n_mul)
        .filter(|t| n_mul.is_multiple_of(*t))
        .map(|t| (t, n_mul / t))
        .collect()
}

/// Brightness-optimized single-link key rates of the hybrid architecture for
/// every multiplexing partition of `n_mul`, ordered by `n_temp` then distance.
///
/// The link states do not depend on the partition, so each distance builds
/// its link grid once and re-scores it per partition.
pub fn partition_sweep(
    params: &HardwareParams,
    regime: &Regime,
    strategy: Strategy,
    n_mul: usize,
    d_points: &[f64],
    grids: &Grids,
    swap: &SwapConfig,
) -> Result<Vec<SweepRow>> {
    if n_mul < 2 {
        return Err(Error::InvalidParameter {
            name: "n_mul",
            reason: format!("{n_mul} < 2"),
        });
    }
    grids.validate()?;
    let scenario = Scenario {
        architecture: Architecture::Hybrid,
        strategy,
        hops: 0,
        regime: regime.clone(),
    };
    scenario.validate()?;
    let base = regime.apply(params);
    let mut d = d_points.to_vec();
    d.sort_by(f64::total_cmp);
    let pairs = divisor_pairs(n_mul);
    let mut cells: Vec<Vec<SweepRow>> = vec![Vec::new(); pairs.len()];
    for &dist in &d {
        let links = link_grid(Architecture::Hybrid, strategy, &base, dist, grids, swap)?;
        let per_pair: Vec<SweepRow> = pairs
            .par_iter()
            .map(|&(n_temp, n_freq)| {
                let p = HardwareParams {
                    n_mul,
                    n_temp,
                    n_freq,
                    ..base.clone()
                };
                let cands = chain_candidates(Architecture::Hybrid, &p, dist, 0, &links)?;
                let opt = pick_optimum(cands, Objective::KeyRate)?;
                Ok(row(&scenario, &p, dist, &opt))
            })
            .collect::<Result<_>>()?;
        for (cell, r) in cells.iter_mut().zip(per_pair) {
            cell.push(r);
        }
    }
    Ok(cells.into_iter().flatten().collect())
}

/// One point of the fidelity-versus-local-loss comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityRow {
    pub epsilon_l: f64,
    pub strategy: Strategy,
    pub fidelity: f64,
}

/// `n` evenly spaced points over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Link fidelity of every strategy against the shared local loss, from the
/// Fock-space pipelines. Ordered by `epsilon_l`, then strategy.
pub fn fidelity_sweep(
    q: f64,
    lambda: f64,
    epsilon_r: f64,
    epsilon_l: &[f64],
    swap: &SwapConfig,
) -> Result<Vec<FidelityRow>> {
    let jobs: Vec<(f64, Strategy)> = epsilon_l
        .iter()
        .flat_map(|&e| Strategy::ALL.into_iter().map(move |s| (e, s)))
        .collect();
    jobs.par_iter()
        .map(|&(el, s)| {
            let loss = LossParams::symmetric(epsilon_r, el)?;
            let out = s.evaluate(q, lambda, &loss, swap)?;
            Ok(FidelityRow {
                epsilon_l: el,
                strategy: s,
                fidelity: out.state.fidelity_psi_plus(),
            })
        })
        .collect()
}

/// Key rate over the whole brightness grid at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrightnessRow {
    pub regime: String,
    pub d_km: f64,
    pub q: f64,
    pub lambda: f64,
    pub r_key: f64,
}

/// Full brightness map for one scenario and end-to-end distance, ordered by
/// `(q, lambda)`.
pub fn brightness_sweep(
    scenario: &Scenario,
    params: &HardwareParams,
    d_end_km: f64,
    grids: &Grids,
    swap: &SwapConfig,
) -> Result<Vec<BrightnessRow>> {
    scenario.validate()?;
    grids.validate()?;
    let params = scenario.regime.apply(params);
    let d_qpu = scenario.d_qpu(d_end_km);
    let links = link_grid(
        scenario.architecture,
        scenario.strategy,
        &params,
        d_qpu,
        grids,
        swap,
    )?;
    let cands = chain_candidates(scenario.architecture, &params, d_qpu, scenario.hops, &links)?;
    Ok(cands
        .into_iter()
        .map(|(q, lambda, c)| BrightnessRow {
            regime: scenario.regime.name.clone(),
            d_km: d_end_km,
            q,
            lambda,
            r_key: score(Objective::KeyRate, &c),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors() {
        assert!(divisor_pairs(1000).contains(&(10, 100)));
        assert_eq!(divisor_pairs(4), vec![(2, 2), (4, 1)]);
        assert!(divisor_pairs(1000).iter().all(|(t, f)| t * f == 1000));
    }

    #[test]
    fn default_grids() {
        let g = Grids::default();
        assert_eq!(g.q.len(), 49);
        assert_eq!(g.q[0], 0.02);
        assert_eq!(g.q[48], 0.98);
        let d = default_distances();
        assert_eq!(d.len(), 20);
        assert!((d[0] - 10.0).abs() < 1e-12 && (d[19] - 200.0).abs() < 1e-9);
    }

    #[test]
    fn tie_break_prefers_smallest_point() {
        let opt = pick_optimum(
            vec![(0.5, 0.1, None), (0.2, 0.3, None), (0.2, 0.1, None)],
            Objective::KeyRate,
        )
        .unwrap();
        assert_eq!((opt.q, opt.lambda), (0.2, 0.1));
        assert!(opt.all_zero);
    }

    #[test]
    fn non_distilling_scenarios_are_rejected() {
        let s = Scenario {
            architecture: Architecture::Hybrid,
            strategy: Strategy::Raw,
            hops: 0,
            regime: Regime::idealized(),
        };
        assert!(s.validate().is_err());
        let s = Scenario {
            strategy: Strategy::PnrEpl,
            hops: 3,
            ..s
        };
        assert!(s.validate().is_err());
    }
}
