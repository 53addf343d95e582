use serde::{Deserialize, Serialize};

use super::geometric::{expected_max_geometric_rounds, p_at_least_two};
use crate::elink::{ElinkResult, LossParams};
use crate::error::{check_probability, Error, Result};
use crate::qproc::{epl, DistillResult};

/// Hardware and protocol parameters. Times are in microseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardwareParams {
    /// Speed of light in fiber, km/us.
    pub c_km_per_us: f64,
    pub fiber_loss_db_per_km: f64,
    pub t_atom_us: f64,
    pub t_spdc_us: f64,
    pub t_meas_us: f64,
    pub t_cnot_us: f64,
    /// Emitters per QPU devoted to one link.
    pub n_atom: usize,
    /// Total spectro-temporal mode budget.
    pub n_mul: usize,
    pub n_temp: usize,
    pub n_freq: usize,
    pub eta_qfc: f64,
    pub eta_qm: f64,
    /// SPDC brightness.
    pub lambda: f64,
    /// Atomic emission probability.
    pub q: f64,
    pub f_threshold: f64,
}

impl Default for HardwareParams {
    fn default() -> Self {
        Self {
            c_km_per_us: 0.2,
            fiber_loss_db_per_km: 0.3,
            t_atom_us: 100.0,
            t_spdc_us: 1.0,
            t_meas_us: 100.0,
            t_cnot_us: 100.0,
            n_atom: 2,
            n_mul: 1000,
            n_temp: 10,
            n_freq: 100,
            eta_qfc: 1.0,
            eta_qm: 1.0,
            lambda: 0.1,
            q: 0.1,
            f_threshold: 0.95,
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl HardwareParams {
    /// Checks ranges and the partition constraint `n_temp * n_freq = n_mul`.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c_km_per_us", self.c_km_per_us),
            ("t_atom_us", self.t_atom_us),
            ("t_spdc_us", self.t_spdc_us),
            ("t_meas_us", self.t_meas_us),
            ("t_cnot_us", self.t_cnot_us),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be positive")));
            }
        }
        if !(self.fiber_loss_db_per_km >= 0.0 && self.fiber_loss_db_per_km.is_finite()) {
            return Err(invalid("fiber_loss_db_per_km", "must be nonnegative"));
        }
        check_probability("eta_qfc", self.eta_qfc)?;
        check_probability("eta_qm", self.eta_qm)?;
        check_probability("q", self.q)?;
        check_probability("f_threshold", self.f_threshold)?;
        crate::states::check_lambda(self.lambda)?;
        if self.n_atom < 2 {
            return Err(invalid("n_atom", "distillation needs at least 2 emitters"));
        }
        if self.n_temp < 2 {
            return Err(invalid(
                "n_temp",
                "distillation needs at least 2 temporal modes",
            ));
        }
        if self.n_freq < 1 {
            return Err(invalid("n_freq", "must be at least 1"));
        }
        if self.n_temp * self.n_freq != self.n_mul {
            return Err(invalid(
                "n_mul",
                format!(
                    "n_temp * n_freq = {} * {} = {} differs from n_mul = {}",
                    self.n_temp,
                    self.n_freq,
                    self.n_temp * self.n_freq,
                    self.n_mul
                ),
            ));
        }
        Ok(())
    }

    /// Transmission of one arm when the swapper sits midway between QPUs
    /// `d_qpu_km` apart.
    pub fn arm_transmission(&self, d_qpu_km: f64) -> f64 {
        arm_transmission(d_qpu_km, self.fiber_loss_db_per_km)
    }

    /// One-way photon travel plus the heralding signal back: `d_qpu / c`.
    pub fn t_signal(&self, d_qpu_km: f64) -> f64 {
        d_qpu_km / self.c_km_per_us
    }

    /// Atom-based link: conversion and fiber loss both count as remote loss.
    pub fn atom_loss(&self, d_qpu_km: f64) -> Result<LossParams> {
        LossParams::new(
            1.0 - self.eta_qfc * self.arm_transmission(d_qpu_km),
            0.0,
            0.0,
        )
    }

    /// Hybrid link: fiber loss is remote, readout and conversion are local.
    pub fn hybrid_loss(&self, d_qpu_km: f64) -> Result<LossParams> {
        LossParams::new(
            1.0 - self.arm_transmission(d_qpu_km),
            1.0 - self.eta_qm,
            1.0 - self.eta_qfc,
        )
    }
}

/// `10^(-alpha (d/2) / 10)` for fiber attenuation `alpha` in dB/km.
pub fn arm_transmission(d_qpu_km: f64, db_per_km: f64) -> f64 {
    10f64.powf(-db_per_km * (d_qpu_km / 2.0) / 10.0)
}

/// Stage durations in microseconds. Hybrid-only stages are `None` for the
/// atom-based architecture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingBreakdown {
    pub t_signal: f64,
    pub t_qm_try: Option<f64>,
    pub t_load: Option<f64>,
    pub t_el_try: f64,
    pub t_ed: f64,
    pub t_el_d: f64,
    pub t_merge: f64,
    pub expected_t_el_d_all: f64,
    pub expected_t_end: f64,
}

impl TimingBreakdown {
    /// End-to-end repetition rate per second.
    pub fn r_rep(&self) -> f64 {
        1e6 / self.expected_t_end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityBreakdown {
    /// Heralding probability per attempt (per frequency mode for the hybrid link).
    pub p_click: f64,
    pub p_click_temp: Option<f64>,
    pub p_load: Option<f64>,
    pub p_el: f64,
    pub p_el_2: f64,
    pub p_ed: f64,
    pub p_el_d: f64,
}

fn check_n_qpu(n_qpu: usize) -> Result<()> {
    if n_qpu < 2 {
        return Err(invalid("n_qpu", "a chain needs at least 2 QPUs"));
    }
    Ok(())
}

fn chain_expectation(
    params: &HardwareParams,
    n_qpu: usize,
    t_signal: f64,
    t_el_try: f64,
    p_el_d: f64,
) -> Result<TimingBreakdown> {
    if p_el_d <= 0.0 {
        return Err(Error::ZeroProbability("distilled elementary link"));
    }
    let t_ed = params.t_cnot_us + params.t_meas_us + t_signal;
    let t_el_d = t_el_try + t_ed;
    let t_merge = params.t_cnot_us + params.t_meas_us + (n_qpu - 1) as f64 * t_signal;
    let rounds = expected_max_geometric_rounds(n_qpu - 1, p_el_d)?;
    let expected_t_el_d_all = t_el_d * rounds;
    Ok(TimingBreakdown {
        t_signal,
        t_qm_try: None,
        t_load: None,
        t_el_try,
        t_ed,
        t_el_d,
        t_merge,
        expected_t_el_d_all,
        expected_t_end: expected_t_el_d_all + t_merge,
    })
}

/// EPL on two copies of the link.
pub fn distill_link(link: &ElinkResult<f64>) -> Result<DistillResult<f64>> {
    epl(&link.state, &link.state)
}

/// Timing and probabilities of the atom-based chain with `n_qpu` QPUs spaced
/// `d_qpu_km` apart, given its raw elementary link.
pub fn atom_timing(
    params: &HardwareParams,
    d_qpu_km: f64,
    n_qpu: usize,
    link: &ElinkResult<f64>,
) -> Result<(TimingBreakdown, ProbabilityBreakdown)> {
    check_n_qpu(n_qpu)?;
    let t_signal = params.t_signal(d_qpu_km);
    let t_el_try = params.n_atom as f64 * params.t_atom_us + t_signal;
    let p_click = link.p_el;
    let p_el_2 = p_at_least_two(p_click, params.n_atom)?;
    let p_ed = distill_link(link)?.p_success;
    let p_el_d = p_el_2 * p_ed;
    let timing = chain_expectation(params, n_qpu, t_signal, t_el_try, p_el_d)?;
    Ok((
        timing,
        ProbabilityBreakdown {
            p_click,
            p_click_temp: None,
            p_load: None,
            p_el: p_click,
            p_el_2,
            p_ed,
            p_el_d,
        },
    ))
}

/// Timing and probabilities of the hybrid chain, given its raw elementary link.
pub fn hybrid_timing(
    params: &HardwareParams,
    d_qpu_km: f64,
    n_qpu: usize,
    link: &ElinkResult<f64>,
) -> Result<(TimingBreakdown, ProbabilityBreakdown)> {
    check_n_qpu(n_qpu)?;
    if params.n_temp < 2 {
        return Err(invalid(
            "n_temp",
            "distillation needs at least 2 temporal modes",
        ));
    }
    let n_temp = params.n_temp as f64;
    let t_signal = params.t_signal(d_qpu_km);
    let t_qm_try = n_temp * params.t_spdc_us + t_signal;
    let t_load = n_temp * (params.t_atom_us + t_signal);
    let t_el_try = t_qm_try + t_load;

    let p_click = link.p_remote_click;
    let p_click_temp = 1.0 - (1.0 - p_click).powi(params.n_freq as i32);
    let p_el = p_click_temp * link.p_load;
    let p_el_2 = p_at_least_two(p_el, params.n_temp)?;
    let p_ed = distill_link(link)?.p_success;
    let p_el_d = p_el_2 * p_ed;
    let mut timing = chain_expectation(params, n_qpu, t_signal, t_el_try, p_el_d)?;
    timing.t_qm_try = Some(t_qm_try);
    timing.t_load = Some(t_load);
    Ok((
        timing,
        ProbabilityBreakdown {
            p_click,
            p_click_temp: Some(p_click_temp),
            p_load: Some(link.p_load),
            p_el,
            p_el_2,
            p_ed,
            p_el_d,
        },
    ))
}
