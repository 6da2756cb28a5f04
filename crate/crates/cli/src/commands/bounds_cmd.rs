//! Evaluates named closed-form bounds from a JSON request list and prints
//! the reports.

use std::path::Path;

use anyhow::{bail, Result};
use serde::Deserialize;
use serde_json::json;

use dissim::bounds::{self, DimBoundFamily, HelperKind};

#[derive(Debug, Deserialize)]
pub struct BoundRequestFile {
    pub bounds: Vec<BoundRequest>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BoundRequest {
    CFinite {
        t: u64,
        card_z: u64,
        delta: f64,
    },
    LsGuaranteeC {
        t: u64,
        cover_size: u64,
        beta: f64,
        beta_prime: f64,
        delta: f64,
    },
    OptimisticRadius {
        t: u64,
        card_z: u64,
        delta: f64,
    },
    BadQueryBound {
        d: u64,
        c: f64,
        eps: f64,
        #[serde(default)]
        alpha: Option<f64>,
    },
    RegretBound {
        d: u64,
        c: f64,
        t: u64,
        deterministic: bool,
    },
    PacParams {
        d: u64,
        c_half_delta: f64,
        eps: f64,
        delta: f64,
    },
    PacParamsDeterministic {
        d: u64,
        eps: f64,
    },
    OracleRadius {
        regret_sq: f64,
        beta: f64,
        beta_prime: f64,
        t: u64,
        delta: f64,
    },
    DimBound {
        family: DimBoundFamily,
    },
    HelperSumBound {
        kind: HelperKind,
        kappa_tau: f64,
        tau: f64,
        t: u64,
        #[serde(default)]
        a: f64,
    },
}

pub fn evaluate(req: &BoundRequest) -> Result<serde_json::Value> {
    Ok(match req {
        BoundRequest::CFinite { t, card_z, delta } => {
            json!({"name": "c_finite", "value": bounds::c_finite(*t, *card_z, *delta)?,
                   "inputs": {"t": t, "card_z": card_z, "delta": delta},
                   "source": "128*ln(2*T*|Z|/delta)"})
        }
        BoundRequest::LsGuaranteeC {
            t,
            cover_size,
            beta,
            beta_prime,
            delta,
        } => {
            json!({"name": "ls_guarantee_c",
                   "value": bounds::ls_guarantee_c(*t, *cover_size, *beta, *beta_prime, *delta)?,
                   "inputs": {"t": t, "cover_size": cover_size, "beta": beta,
                              "beta_prime": beta_prime, "delta": delta},
                   "source": "16*beta*beta'*ln(2*T*N/delta)"})
        }
        BoundRequest::OptimisticRadius { t, card_z, delta } => {
            let r = bounds::optimistic_radius(*t, *card_z, *delta)?;
            json!({"name": "optimistic_radius", "value": r,
                   "error_constant": bounds::optimistic_error_constant(r),
                   "inputs": {"t": t, "card_z": card_z, "delta": delta},
                   "source": "R = 128*ln(2*T*|Z|/delta); C = 4*R"})
        }
        BoundRequest::BadQueryBound { d, c, eps, alpha } => {
            let b = bounds::bad_query_bound(*d, *c, *eps)?;
            let note = alpha.and_then(|a| {
                bounds::no_bad_queries_possible(a, *eps)
                    .then(|| "eps >= 1 + alpha: no query can be eps-bad".to_string())
            });
            json!({"name": "bad_query_bound", "value": b,
                   "inputs": {"d": d, "c": c, "eps": eps, "alpha": alpha}, "note": note,
                   "source": "2*d^1.5*ln(4/eps) + 12*d^2.5*C/eps^2"})
        }
        BoundRequest::RegretBound {
            d,
            c,
            t,
            deterministic,
        } => serde_json::to_value(bounds::regret_bound(*d, *c, *t, *deterministic)?)?,
        BoundRequest::PacParams {
            d,
            c_half_delta,
            eps,
            delta,
        } => {
            json!({"name": "pac_params",
                   "value": bounds::pac_params(*d, *c_half_delta, *eps, *delta)?,
                   "inputs": {"d": d, "c_half_delta": c_half_delta, "eps": eps, "delta": delta},
                   "source": "T >= 64*d^2.5*C/eps^2; n1 = ceil(log2(4/delta)); n2 = ceil(128*ln(8*n1/delta)/eps^2)"})
        }
        BoundRequest::PacParamsDeterministic { d, eps } => {
            json!({"name": "pac_params_deterministic",
                   "value": bounds::pac_params_deterministic(*d, *eps)?,
                   "inputs": {"d": d, "eps": eps},
                   "source": "least integer > 2*d^1.5*ln(4/eps)"})
        }
        BoundRequest::OracleRadius {
            regret_sq,
            beta,
            beta_prime,
            t,
            delta,
        } => {
            json!({"name": "oracle_radius",
                   "value": bounds::oracle_radius(*regret_sq, *beta, *beta_prime, *t, *delta)?,
                   "inputs": {"regret_sq": regret_sq, "beta": beta, "beta_prime": beta_prime,
                              "t": t, "delta": delta},
                   "source": "8*Regret_sq(T) + 64*beta*max(beta,beta')*ln(T/delta)"})
        }
        BoundRequest::DimBound { family } => {
            json!({"name": "dim_bound", "family": family,
                   "value": bounds::dim_bound(*family)?})
        }
        BoundRequest::HelperSumBound {
            kind,
            kappa_tau,
            tau,
            t,
            a,
        } => {
            json!({"name": "helper_sum_bound",
                   "value": bounds::helper_sum_bound(*kind, *kappa_tau, *tau, *t, *a)?,
                   "inputs": {"kappa_tau": kappa_tau, "tau": tau, "t": t, "a": a},
                   "source": "T*tau + 2*sqrt(kappa*T) | T*tau + a*(1+kappa)*exp(-1/kappa)"})
        }
    })
}

pub fn run(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(config_path)?;
    let file: BoundRequestFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => bail!(dissim::Error::Config(format!(
            "parsing bound requests: {e}"
        ))),
    };
    let mut reports = Vec::new();
    for req in &file.bounds {
        reports.push(evaluate(req)?);
    }
    let rendered = serde_json::to_string_pretty(&reports)?;
    println!("{rendered}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("bounds.json"), &rendered)?;
    }
    Ok(())
}
