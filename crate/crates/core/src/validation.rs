//! Self-checks behind `qrep validate`: Fock pipelines against the closed
//! forms, reference snapshots, distillation exactness, the round-count
//! expectation, and physicality of every state produced along the way.

use num_rational::BigRational;
use serde::Serialize;

use crate::elink::{
    analytic_epl, analytic_pnr, analytic_raw, analytic_re, hybrid_raw_elink, re_trick, LossParams,
    Strategy, SwapConfig,
};
use crate::error::Result;
use crate::fock::{BeamSplitterConvention, DetectorModel};
use crate::qproc::epl;
use crate::rates::{
    expected_max_geometric_rounds, monte_carlo_max_geometric, tail_sum_max_geometric,
};
use crate::scalar::{half, lit};
use crate::sweep::{fidelity_sweep, linspace};
use crate::two_qubit::{TwoQubitState, DD};

/// One named check with its tolerance and the observed deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    /// `None` when the check could not be evaluated.
    pub observed: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Beam-splitter convention used by every Fock pipeline.
    pub convention: BeamSplitterConvention,
    pub seed: u64,
    pub mc_trials: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            convention: BeamSplitterConvention::Standard,
            seed: 0,
            mc_trials: 100_000,
        }
    }
}

/// Worst physicality defect seen over a set of states.
#[derive(Default)]
struct Physicality {
    hermiticity: f64,
    trace: f64,
    negativity: f64,
}

impl Physicality {
    fn record(&mut self, s: &TwoQubitState<f64>) {
        self.hermiticity = self.hermiticity.max(s.hermiticity_defect());
        self.trace = self.trace.max((s.trace() - 1.0).abs());
        self.negativity = self.negativity.max(-s.min_eigenvalue());
    }
}

fn check(name: &str, tolerance: f64, observed: Result<f64>) -> Check {
    match observed {
        Ok(v) => Check {
            name: name.to_string(),
            tolerance,
            observed: Some(v),
            passed: v <= tolerance,
            error: None,
        },
        Err(e) => Check {
            name: name.to_string(),
            tolerance,
            observed: None,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

fn cfg(detector: DetectorModel, opts: &ValidationOptions) -> SwapConfig {
    SwapConfig {
        detector,
        convention: opts.convention,
        ..SwapConfig::default()
    }
}

fn snapshot_dev(s: &TwoQubitState<f64>, diag: [f64; 4], coh: f64) -> f64 {
    let d = s.diag();
    (0..4)
        .map(|k| (d[k] - diag[k]).abs())
        .fold((s.coherence().re - coh).abs(), f64::max)
}

fn closed_form_grid(opts: &ValidationOptions, phys: &mut Physicality) -> Result<f64> {
    let mut worst = 0.0f64;
    for q in [0.05, 0.1, 0.3] {
        for lam in [0.05, 0.1, 0.2] {
            for er in [0.0, 0.5, 0.9] {
                for el in [0.0, 0.3, 0.75] {
                    let loss = LossParams::symmetric(er, el)?;
                    let raw =
                        hybrid_raw_elink(q, lam, &loss, &cfg(DetectorModel::Threshold, opts))?;
                    let pnr = hybrid_raw_elink(q, lam, &loss, &cfg(DetectorModel::Pnr, opts))?;
                    phys.record(&raw.state);
                    phys.record(&pnr.state);
                    worst = worst.max(raw.state.max_abs_diff(&analytic_raw(q, lam, er, el)?));
                    worst = worst.max(pnr.state.max_abs_diff(&analytic_pnr(q, lam, er, el)?));
                }
            }
        }
    }
    Ok(worst)
}

fn re_grid(opts: &ValidationOptions, phys: &mut Physicality) -> Result<f64> {
    let c = cfg(DetectorModel::Threshold, opts);
    let mut worst = 0.0f64;
    for (q, lam, er, el) in [
        (0.1, 0.1, 0.5, 0.0),
        (0.3, 0.05, 0.9, 0.3),
        (0.05, 0.2, 0.0, 0.75),
    ] {
        let loss = LossParams::symmetric(er, el)?;
        let raw = hybrid_raw_elink(q, lam, &loss, &c)?;
        let re = re_trick(&raw.state, lam, &loss, &c)?;
        phys.record(&re.state);
        worst = worst.max(
            re.state
                .max_abs_diff(&analytic_re(&raw.state, lam, er, el)?),
        );
    }
    Ok(worst)
}

fn reference_point(opts: &ValidationOptions, phys: &mut Physicality) -> Result<[f64; 3]> {
    let loss = LossParams::symmetric(0.5, 0.0)?;
    let raw = hybrid_raw_elink(0.1, 0.1, &loss, &cfg(DetectorModel::Threshold, opts))?;
    let pnr = hybrid_raw_elink(0.1, 0.1, &loss, &cfg(DetectorModel::Pnr, opts))?;
    let d = epl(&raw.state, &raw.state)?;
    phys.record(&d.state);
    let raw_dev = snapshot_dev(&raw.state, [0.094, 0.425, 0.425, 0.056], 0.422)
        .max((raw.state.fidelity_psi_plus() - 0.847).abs());
    let pnr_dev = snapshot_dev(&pnr.state, [0.0, 0.478, 0.478, 0.044], 0.478)
        .max((pnr.state.fidelity_psi_plus() - 0.956).abs());
    let epl_dev = snapshot_dev(&d.state, [0.014, 0.486, 0.486, 0.014], 0.480)
        .max((d.state.fidelity_psi_plus() - 0.965).abs());
    Ok([raw_dev, pnr_dev, epl_dev])
}

fn epl_closed_form(opts: &ValidationOptions) -> Result<f64> {
    let mut worst = 0.0f64;
    for (q, lam, er, el) in [(0.1, 0.1, 0.5, 0.0), (0.3, 0.2, 0.7, 0.4)] {
        let loss = LossParams::symmetric(er, el)?;
        let raw = hybrid_raw_elink(q, lam, &loss, &cfg(DetectorModel::Threshold, opts))?;
        let d = epl(&raw.state, &raw.state)?;
        worst = worst.max(d.state.max_abs_diff(&analytic_epl(&raw.state)?));
    }
    Ok(worst)
}

fn unit_fidelity(opts: &ValidationOptions) -> Result<(f64, f64)> {
    let (mut closed, mut oracle) = (0.0f64, 0.0f64);
    for q in [0.1f64, 0.5] {
        for lam in [0.05, 0.2] {
            for er in [0.3, 0.9] {
                let s = Strategy::PnrEpl.closed_form(q, lam, er, 0.0)?;
                closed = closed.max((1.0 - s.fidelity_psi_plus()).abs());
                let loss = LossParams::symmetric(er, 0.0)?;
                let out =
                    Strategy::PnrEpl.evaluate(q, lam, &loss, &cfg(DetectorModel::Pnr, opts))?;
                oracle = oracle.max((1.0 - out.state.fidelity_psi_plus()).abs());
            }
        }
    }
    Ok((closed, oracle))
}

fn epl_exactness() -> Result<f64> {
    let psi = TwoQubitState::<f64>::psi_plus();
    let d = epl(&psi, &psi)?;
    let mut worst = d.state.max_abs_diff(&psi).max((d.p_success - 0.5).abs());
    for alpha in [0.1f64, 0.5, 0.9] {
        let mut diag = [0.0; 4];
        diag[1] = (1.0 - alpha) / 2.0;
        diag[2] = (1.0 - alpha) / 2.0;
        diag[DD] = alpha;
        let noisy = TwoQubitState::x_state(diag, ((1.0 - alpha) / 2.0).into());
        let out = epl(&noisy, &noisy)?;
        worst = worst.max((1.0 - out.state.fidelity_psi_plus()).abs());
    }
    Ok(worst)
}

const GEOMETRIC_P: [f64; 4] = [0.05, 0.1, 0.5, 0.9];

fn geometric_tail() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for p in GEOMETRIC_P {
            let finite = expected_max_geometric_rounds(n, p)?;
            worst = worst.max((finite - tail_sum_max_geometric(n, p, 1e-17)?).abs());
        }
    }
    Ok(worst)
}

fn geometric_monte_carlo(opts: &ValidationOptions) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for (k, p) in GEOMETRIC_P.into_iter().enumerate() {
            let exact = expected_max_geometric_rounds(n, p)?;
            let seed = opts.seed.wrapping_add((n * 16 + k) as u64);
            let mc = monte_carlo_max_geometric(n, p, opts.mc_trials, seed)?;
            worst = worst.max((mc / exact - 1.0).abs());
        }
    }
    Ok(worst)
}

fn geometric_exact() -> Result<f64> {
    let got = expected_max_geometric_rounds(2, half::<BigRational>())?;
    let want = lit::<BigRational>(8) / lit::<BigRational>(3);
    Ok(if got == want { 0.0 } else { 1.0 })
}

fn strategy_ordering(opts: &ValidationOptions, phys: &mut Physicality) -> Result<f64> {
    let swap = cfg(DetectorModel::Threshold, opts);
    let rows = fidelity_sweep(0.1, 0.1, 0.5, &linspace(0.0, 0.9, 21), &swap)?;
    let mut worst = f64::NEG_INFINITY;
    for chunk in rows.chunks(Strategy::ALL.len()) {
        let best = chunk
            .iter()
            .find(|r| r.strategy == Strategy::PnrEpl)
            .map(|r| r.fidelity)
            .unwrap_or(f64::NAN);
        let other = chunk
            .iter()
            .filter(|r| r.strategy != Strategy::PnrEpl)
            .map(|r| r.fidelity)
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(other - best);
    }
    for (q, lam, el) in [(0.1, 0.1, 0.0), (0.1, 0.1, 0.45), (0.1, 0.1, 0.9)] {
        let loss = LossParams::symmetric(0.5, el)?;
        for s in Strategy::ALL {
            phys.record(&s.evaluate(q, lam, &loss, &swap)?.state);
        }
    }
    Ok(worst.max(0.0))
}

/// Runs every check. Only the Monte Carlo check depends on the seed.
pub fn run_validation(opts: &ValidationOptions) -> ValidationReport {
    let mut phys = Physicality::default();
    let mut checks = vec![check(
        "oracle_vs_closed_form_grid_81",
        1e-6,
        closed_form_grid(opts, &mut phys),
    )];
    match reference_point(opts, &mut phys) {
        Ok([raw, pnr, d]) => {
            checks.push(check("reference_raw_link", 1e-3, Ok(raw)));
            checks.push(check("reference_pnr_link", 2e-3, Ok(pnr)));
            checks.push(check("reference_epl_link", 1e-3, Ok(d)));
        }
        Err(e) => {
            for name in [
                "reference_raw_link",
                "reference_pnr_link",
                "reference_epl_link",
            ] {
                checks.push(check(name, 1e-3, Err(e.clone())));
            }
        }
    }
    checks.push(check("epl_vs_closed_form", 1e-9, epl_closed_form(opts)));
    checks.push(check("re_vs_closed_form", 1e-6, re_grid(opts, &mut phys)));
    match unit_fidelity(opts) {
        Ok((closed, oracle)) => {
            checks.push(check("pnr_epl_unit_fidelity_closed_form", 1e-9, Ok(closed)));
            checks.push(check("pnr_epl_unit_fidelity_oracle", 1e-6, Ok(oracle)));
        }
        Err(e) => {
            checks.push(check(
                "pnr_epl_unit_fidelity_closed_form",
                1e-9,
                Err(e.clone()),
            ));
            checks.push(check("pnr_epl_unit_fidelity_oracle", 1e-6, Err(e)));
        }
    }
    checks.push(check("epl_exactness", 1e-12, epl_exactness()));
    checks.push(check(
        "strategy_ordering",
        1e-12,
        strategy_ordering(opts, &mut phys),
    ));
    checks.push(check("rounds_finite_vs_tail_sum", 1e-9, geometric_tail()));
    checks.push(check("rounds_exact_two_half", 0.0, geometric_exact()));
    checks.push(check(
        "rounds_vs_monte_carlo_relative",
        0.01,
        geometric_monte_carlo(opts),
    ));
    checks.push(check(
        "hermiticity",
        crate::HERMITICITY_TOL,
        Ok(phys.hermiticity),
    ));
    checks.push(check("unit_trace", crate::STATE_TRACE_TOL, Ok(phys.trace)));
    checks.push(check("positivity", crate::PSD_TOL, Ok(phys.negativity)));
    ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        seed: opts.seed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run_validation(&ValidationOptions::default());
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn flipped_splitter_is_caught() {
        let opts = ValidationOptions {
            convention: BeamSplitterConvention::SignFlipped,
            mc_trials: 1000,
            ..Default::default()
        };
        let report = run_validation(&opts);
        assert!(!report.passed);
        let grid = &report.checks[0];
        assert_eq!(grid.name, "oracle_vs_closed_form_grid_81");
        assert!(!grid.passed);
    }
}
