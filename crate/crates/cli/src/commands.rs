use std::path::PathBuf;

use clap::ValueEnum;
use qrep::elink::{LossParams, Strategy};
use qrep::sweep::{self, Scenario, SweepRow};
use qrep::two_qubit::TwoQubitState;
use qrep::validation::{run_validation, ValidationOptions, ValidationReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{num, write_csv, write_json};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Fidelity,
    Brightness,
    Partition,
    Keyrate,
    Edr,
}

#[derive(Serialize)]
struct MatrixJson {
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
}

impl From<&TwoQubitState<f64>> for MatrixJson {
    fn from(s: &TwoQubitState<f64>) -> Self {
        let mut re = [[0.0; 4]; 4];
        let mut im = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                re[r][c] = s.get(r, c).re;
                im[r][c] = s.get(r, c).im;
            }
        }
        Self { re, im }
    }
}

#[derive(Serialize)]
struct StrategyJson {
    strategy: Strategy,
    fidelity: f64,
    state: MatrixJson,
    raw_state: MatrixJson,
    p_remote_click: f64,
    p_load: f64,
    p_el: f64,
    /// Distillation success probability; 1 for non-distilling strategies.
    p_distill: f64,
}

#[derive(Serialize)]
struct ElinkJson {
    q: f64,
    lambda: f64,
    epsilon_r: f64,
    epsilon_l: f64,
    strategies: Vec<StrategyJson>,
}

pub fn cmd_elink(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let p = cfg.link;
    let loss = LossParams::symmetric(p.epsilon_r, p.epsilon_l)?;
    let swap = cfg.swap.config();
    let mut strategies = Vec::new();
    for &s in &cfg.strategies {
        let out = s.evaluate(p.q, p.lambda, &loss, &swap)?;
        strategies.push(StrategyJson {
            strategy: s,
            fidelity: out.state.fidelity_psi_plus(),
            state: (&out.state).into(),
            raw_state: (&out.link.state).into(),
            p_remote_click: out.link.p_remote_click,
            p_load: out.link.p_load,
            p_el: out.link.p_el,
            p_distill: out.p_distill,
        });
    }
    let doc = ElinkJson {
        q: p.q,
        lambda: p.lambda,
        epsilon_r: p.epsilon_r,
        epsilon_l: p.epsilon_l,
        strategies,
    };
    write_json(&cfg.out_dir, "elink.json", &doc, cfg)
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidationReport, CliError> {
    let opts = ValidationOptions {
        convention: cfg.swap.convention,
        seed: cfg.seed,
        mc_trials: cfg.mc_trials,
    };
    let report = run_validation(&opts);
    write_json(&cfg.out_dir, "validate_report.json", &report, cfg)?;
    Ok(report)
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn require_scenarios(cfg: &RunConfig) -> Result<&[Scenario], CliError> {
    if cfg.scenarios.is_empty() {
        return Err(CliError::Config("`scenarios`: empty scenario list".into()));
    }
    Ok(&cfg.scenarios)
}

/// Rate table columns: the primary metric follows `fidelity`, the other one
/// sits among the extras.
fn rate_header(primary: &'static str, secondary: &'static str) -> Vec<&'static str> {
    vec![
        "arch", "hops", "regime", "d_km", "r_rep", "fidelity", primary, "strategy", "q", "lambda",
        "n_temp", "n_freq", "p_el_d", secondary, "all_zero",
    ]
}

fn rate_row(r: &SweepRow, primary: f64, secondary: f64) -> Vec<String> {
    vec![
        r.arch.label().to_string(),
        r.hops.to_string(),
        r.regime.clone(),
        num(r.d_km),
        num(r.r_rep),
        num(r.fidelity),
        num(primary),
        r.strategy.to_string(),
        num(r.q),
        num(r.lambda),
        r.n_temp.to_string(),
        r.n_freq.to_string(),
        num(r.p_el_d),
        num(secondary),
        flag(r.all_zero),
    ]
}

pub fn cmd_sweep(cfg: &RunConfig, kind: SweepKind) -> Result<PathBuf, CliError> {
    let swap = cfg.swap.config();
    let hw = &cfg.hardware;
    let dir = &cfg.out_dir;
    match kind {
        SweepKind::Fidelity => {
            let p = cfg.link;
            let rows =
                sweep::fidelity_sweep(p.q, p.lambda, p.epsilon_r, &cfg.fidelity.epsilon_l, &swap)?;
            write_csv(
                dir,
                "fidelity.csv",
                &["epsilon_l", "strategy", "fidelity"],
                rows.iter()
                    .map(|r| vec![num(r.epsilon_l), r.strategy.to_string(), num(r.fidelity)]),
                cfg,
            )
        }
        SweepKind::Brightness => {
            let b = &cfg.brightness;
            let mut rows = Vec::new();
            for regime in &cfg.regimes {
                let s = Scenario {
                    architecture: b.architecture,
                    strategy: b.strategy,
                    hops: b.hops,
                    regime: regime.clone(),
                };
                rows.extend(sweep::brightness_sweep(&s, hw, b.d_km, &cfg.grids, &swap)?);
            }
            write_csv(
                dir,
                "brightness.csv",
                &["regime", "d_km", "q", "lambda", "r_key"],
                rows.iter().map(|r| {
                    vec![
                        r.regime.clone(),
                        num(r.d_km),
                        num(r.q),
                        num(r.lambda),
                        num(r.r_key),
                    ]
                }),
                cfg,
            )
        }
        SweepKind::Partition => {
            let mut rows = Vec::new();
            for regime in &cfg.regimes {
                rows.extend(sweep::partition_sweep(
                    hw,
                    regime,
                    cfg.partition.strategy,
                    hw.n_mul,
                    &cfg.partition.distances_km,
                    &cfg.grids,
                    &swap,
                )?);
            }
            write_csv(
                dir,
                "partition.csv",
                &[
                    "n_temp", "n_freq", "d_km", "r_key", "regime", "strategy", "q", "lambda",
                    "r_rep", "fidelity", "all_zero",
                ],
                rows.iter().map(|r| {
                    vec![
                        r.n_temp.to_string(),
                        r.n_freq.to_string(),
                        num(r.d_km),
                        num(r.r_key),
                        r.regime.clone(),
                        r.strategy.to_string(),
                        num(r.q),
                        num(r.lambda),
                        num(r.r_rep),
                        num(r.fidelity),
                        flag(r.all_zero),
                    ]
                }),
                cfg,
            )
        }
        SweepKind::Keyrate => {
            let rows = sweep::keyrate_vs_distance(
                require_scenarios(cfg)?,
                hw,
                &cfg.distances_km,
                &cfg.grids,
                &swap,
            )?;
            write_csv(
                dir,
                "keyrate.csv",
                &rate_header("r_key", "edr"),
                rows.iter().map(|r| rate_row(r, r.r_key, r.edr)),
                cfg,
            )
        }
        SweepKind::Edr => {
            let rows = sweep::edr_vs_distance(
                require_scenarios(cfg)?,
                hw,
                &cfg.distances_km,
                &cfg.grids,
                &swap,
            )?;
            write_csv(
                dir,
                "edr.csv",
                &rate_header("edr", "r_key"),
                rows.iter().map(|r| rate_row(r, r.edr, r.r_key)),
                cfg,
            )
        }
    }
}
