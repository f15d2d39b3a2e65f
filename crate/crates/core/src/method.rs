//! Uniform entry point over the trust-region method and the baseline flows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{flow, FlowParams, Scheme};
use crate::driver::{self, TRParams, TRTrace};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Implicit-explicit trust region.
    #[default]
    Tr,
    Sis,
    Ssis1,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Tr => "tr",
            Method::Sis => "sis",
            Method::Ssis1 => "ssis1",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tr" | "imex-tr" => Ok(Method::Tr),
            "sis" => Ok(Method::Sis),
            "ssis1" => Ok(Method::Ssis1),
            other => Err(Error::Config(format!("unknown method '{other}' (expected tr, sis or ssis1)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum RunTrace {
    Tr(TRTrace),
    Flow(Vec<crate::baselines::FlowRecord>),
}

impl RunTrace {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        match self {
            RunTrace::Tr(t) => t.write_csv(out),
            RunTrace::Flow(f) => crate::baselines::write_flow_csv(out, f),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub method: Method,
    pub v: SpectralField,
    pub energy: f64,
    pub grad_inf: f64,
    pub converged: bool,
    pub iterations: usize,
    pub trace: RunTrace,
}

/// Runs `method` from `v0`.
pub fn run_method(
    method: Method,
    v0: SpectralField,
    p: &ModelParams,
    tr: &TRParams,
    fp: &FlowParams,
) -> Result<RunOutcome> {
    match method {
        Method::Tr => {
            let out = driver::run(v0, p, tr)?;
            Ok(RunOutcome {
                method,
                v: out.v,
                energy: out.energy,
                grad_inf: out.grad_inf,
                converged: out.converged,
                iterations: out.iterations,
                trace: RunTrace::Tr(out.trace),
            })
        }
        Method::Sis | Method::Ssis1 => {
            let scheme = if method == Method::Sis { Scheme::Sis } else { Scheme::Ssis1 };
            let out = flow(scheme, v0, p, fp, |_, _| {})?;
            Ok(RunOutcome {
                method,
                v: out.v,
                energy: out.energy,
                grad_inf: out.grad_inf,
                converged: out.converged,
                iterations: out.steps,
                trace: RunTrace::Flow(out.trace),
            })
        }
    }
}
