use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::analytic::{analytic_epl, analytic_pnr, analytic_pnr_epl, analytic_raw, analytic_re};
use super::pipeline::{hybrid_raw_elink, re_trick, ElinkResult, LossParams, SwapConfig};
use crate::error::{Error, Result};
use crate::fock::DetectorModel;
use crate::qproc::epl;
use crate::scalar::{Real, Scalar};
use crate::two_qubit::TwoQubitState;

/// Error-suppression strategy for the hybrid elementary link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "raw")]
    Raw,
    #[serde(rename = "pnr")]
    Pnr,
    #[serde(rename = "epl")]
    Epl,
    #[serde(rename = "pnr+epl")]
    PnrEpl,
    #[serde(rename = "re")]
    Re,
    #[serde(rename = "pnr+re")]
    PnrRe,
}

/// Link state produced by a strategy together with the raw link it started from.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome<T> {
    pub state: TwoQubitState<T>,
    pub link: ElinkResult<T>,
    /// EPL success probability, or one for strategies without distillation.
    pub p_distill: T,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Raw,
        Strategy::Pnr,
        Strategy::Epl,
        Strategy::PnrEpl,
        Strategy::Re,
        Strategy::PnrRe,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Raw => "raw",
            Strategy::Pnr => "pnr",
            Strategy::Epl => "epl",
            Strategy::PnrEpl => "pnr+epl",
            Strategy::Re => "re",
            Strategy::PnrRe => "pnr+re",
        }
    }

    pub fn detector(self) -> DetectorModel {
        match self {
            Strategy::Pnr | Strategy::PnrEpl | Strategy::PnrRe => DetectorModel::Pnr,
            Strategy::Raw | Strategy::Epl | Strategy::Re => DetectorModel::Threshold,
        }
    }

    pub fn distills(self) -> bool {
        matches!(self, Strategy::Epl | Strategy::PnrEpl)
    }

    /// Runs the Fock-space pipeline. EPL consumes two copies of the link.
    pub fn evaluate<T: Real>(
        self,
        q: T,
        lambda: T,
        loss: &LossParams,
        swap: &SwapConfig,
    ) -> Result<StrategyOutcome<T>> {
        let cfg = SwapConfig {
            detector: self.detector(),
            ..*swap
        };
        let link = hybrid_raw_elink(q, lambda, loss, &cfg)?;
        let (state, p_distill) = match self {
            Strategy::Raw | Strategy::Pnr => (link.state.clone(), T::one()),
            Strategy::Epl | Strategy::PnrEpl => {
                let d = epl(&link.state, &link.state)?;
                (d.state, d.p_success)
            }
            Strategy::Re | Strategy::PnrRe => {
                (re_trick(&link.state, lambda, loss, &cfg)?.state, T::one())
            }
        };
        Ok(StrategyOutcome {
            state,
            link,
            p_distill,
        })
    }

    /// The closed-form state with shared local loss `el`.
    ///
    /// No closed form exists for `pnr+re`.
    pub fn closed_form<S: Scalar>(self, q: S, lambda: S, er: S, el: S) -> Result<TwoQubitState<S>> {
        match self {
            Strategy::Raw => analytic_raw(q, lambda, er, el),
            Strategy::Pnr => analytic_pnr(q, lambda, er, el),
            Strategy::Epl => analytic_epl(&analytic_raw(q, lambda, er, el)?),
            Strategy::PnrEpl => analytic_pnr_epl(lambda, er, el),
            Strategy::Re => {
                let raw = analytic_raw(q, lambda.clone(), er.clone(), el.clone())?;
                analytic_re(&raw, lambda, er, el)
            }
            Strategy::PnrRe => Err(Error::InvalidParameter {
                name: "strategy",
                reason: "pnr+re has no closed form".into(),
            }),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "strategy",
                reason: format!("unknown strategy `{s}`"),
            })
    }
}
