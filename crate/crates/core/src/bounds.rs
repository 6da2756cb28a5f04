//! Closed-form evaluators for every constant-bearing bound: the
//! finite-class and covering-number estimation-error constants, the
//! bad-query and regret caps, PAC parameters, the oracle confidence
//! radius, per-family dimension bounds, and the two summation helpers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One evaluated bound, with its inputs echoed for audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    /// The formula the value instantiates.
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl BoundReport {
    fn new(name: &str, inputs: &[(&str, f64)], value: f64, source: &str) -> Self {
        BoundReport {
            name: name.to_string(),
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value,
            source: source.to_string(),
            warning: None,
        }
    }
}

/// Estimation-error constant for a finite alternative set:
/// 128 * ln(2 * T * |Z| / delta).
pub fn c_finite(t_steps: u64, card_z: u64, delta: f64) -> Result<f64> {
    if t_steps == 0 || card_z == 0 {
        return Err(Error::invalid("T and |Z| must be at least 1"));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    Ok(128.0 * (2.0 * t_steps as f64 * card_z as f64 / delta).ln())
}

/// General least-squares constant:
/// 16 * beta * beta' * ln(2 * T * N / delta) where N is a covering number
/// at radius beta'/T. Requires beta' >= 2 * beta > 0.
pub fn ls_guarantee_c(
    t_steps: u64,
    cover_size: u64,
    beta: f64,
    beta_prime: f64,
    delta: f64,
) -> Result<f64> {
    if t_steps == 0 || cover_size == 0 {
        return Err(Error::invalid("T and the cover size must be at least 1"));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    if !(beta > 0.0 && beta_prime >= 2.0 * beta) {
        return Err(Error::invalid("need beta' >= 2 * beta > 0"));
    }
    Ok(16.0 * beta * beta_prime * (2.0 * t_steps as f64 * cover_size as f64 / delta).ln())
}

/// Confidence radius for the optimistic rule over a finite set (the same
/// 128-constant formula); the error constant it induces is 4 * R.
pub fn optimistic_radius(t_steps: u64, card_z: u64, delta: f64) -> Result<f64> {
    c_finite(t_steps, card_z, delta)
}

pub fn optimistic_error_constant(radius: f64) -> f64 {
    4.0 * radius
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BadQueryBound {
    /// 2 d^1.5 ln(4/eps) + 12 d^2.5 C / eps^2.
    pub general: f64,
    /// 36 d^2.5 C / eps^2, applicable when C >= ln(2T).
    pub simplified_stochastic: f64,
    /// 2 d^1.5 ln(4/eps), the C = 0 clause.
    pub deterministic: f64,
}

/// Caps on the number of eps-bad queries as a function of the monotone
/// dimension and the estimation-error constant.
pub fn bad_query_bound(d: u64, c: f64, eps: f64) -> Result<BadQueryBound> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if eps <= 0.0 {
        return Err(Error::invalid("eps must be positive"));
    }
    if c < 0.0 {
        return Err(Error::invalid("C must be nonnegative"));
    }
    let d = d as f64;
    let deterministic = 2.0 * d.powf(1.5) * (4.0 / eps).ln();
    Ok(BadQueryBound {
        general: deterministic + 12.0 * d.powf(2.5) * c / (eps * eps),
        simplified_stochastic: 36.0 * d.powf(2.5) * c / (eps * eps),
        deterministic,
    })
}

/// No query can be eps-bad once eps >= 1 + alpha (values never fall below
/// alpha - eps <= -1).
pub fn no_bad_queries_possible(alpha: f64, eps: f64) -> bool {
    eps >= 1.0 + alpha
}

/// Regret cap: 1 + 12 d^1.25 sqrt(C T), or 1 + 12 d^1.5 when
/// deterministic. A warning is attached when the stochastic form is used
/// below its C >= ln(2T) precondition.
pub fn regret_bound(d: u64, c: f64, t_steps: u64, deterministic: bool) -> Result<BoundReport> {
    if d == 0 || t_steps == 0 {
        return Err(Error::invalid("dimension and T must be at least 1"));
    }
    let df = d as f64;
    let mut report = if deterministic {
        BoundReport::new(
            "regret_bound_deterministic",
            &[("d", df), ("t", t_steps as f64)],
            1.0 + 12.0 * df.powf(1.5),
            "1 + 12*d^1.5",
        )
    } else {
        BoundReport::new(
            "regret_bound",
            &[("d", df), ("c", c), ("t", t_steps as f64)],
            1.0 + 12.0 * df.powf(1.25) * (c * t_steps as f64).sqrt(),
            "1 + 12*d^1.25*sqrt(C*T)",
        )
    };
    if !deterministic && c < (2.0 * t_steps as f64).ln() {
        report.warning = Some(format!(
            "C = {c} is below ln(2T) = {}; the bound's precondition fails",
            (2.0 * t_steps as f64).ln()
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PacParams {
    pub t_min: u64,
    pub n1: u64,
    pub n2: u64,
    pub total_queries: u64,
}

/// Stochastic PAC parameters: T >= 64 d^2.5 C_{T,delta/2} / eps^2,
/// n1 = ceil(log2(4/delta)), n2 = ceil(128 ln(8 n1/delta) / eps^2).
pub fn pac_params(d: u64, c_half_delta: f64, eps: f64, delta: f64) -> Result<PacParams> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if eps <= 0.0 || !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid("need eps > 0 and delta in (0, 1)"));
    }
    let t_min = (64.0 * (d as f64).powf(2.5) * c_half_delta / (eps * eps)).ceil() as u64;
    let t_min = t_min.max(1);
    let n1 = (4.0 / delta).log2().ceil() as u64;
    let n1 = n1.max(1);
    let n2 = (128.0 * (8.0 * n1 as f64 / delta).ln() / (eps * eps)).ceil() as u64;
    Ok(PacParams {
        t_min,
        n1,
        n2,
        total_queries: t_min + n1 * n2,
    })
}

/// Deterministic PAC run length: the least integer strictly exceeding
/// 2 d^1.5 ln(4/eps); no resampling.
pub fn pac_params_deterministic(d: u64, eps: f64) -> Result<u64> {
    if d == 0 || eps <= 0.0 {
        return Err(Error::invalid("need d >= 1 and eps > 0"));
    }
    let threshold = 2.0 * (d as f64).powf(1.5) * (4.0 / eps).ln();
    Ok(threshold.floor() as u64 + 1)
}

/// Confidence radius induced by an online regression oracle:
/// 8 * Regret_sq(T) + 64 * beta * max(beta, beta') * ln(T/delta).
pub fn oracle_radius(
    regret_sq_t: f64,
    beta: f64,
    beta_prime: f64,
    t_steps: u64,
    delta: f64,
) -> Result<f64> {
    if regret_sq_t < 0.0 {
        return Err(Error::invalid("oracle regret must be nonnegative"));
    }
    if t_steps == 0 || !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid("need T >= 1 and delta in (0, 1)"));
    }
    Ok(8.0 * regret_sq_t + 64.0 * beta * beta.max(beta_prime) * (t_steps as f64 / delta).ln())
}

/// Per-family dimension bound: exact families return numbers, asymptotic
/// families return the growth expression and are never used as pass/fail
/// comparators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimBound {
    Exact { value: f64 },
    Asymptotic { expression: String, scale: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DimBoundFamily {
    Linear {
        n: u64,
        alpha_is_one: bool,
    },
    Glm {
        n: u64,
        r: f64,
        h_upper: f64,
        eps: f64,
    },
    Relu {
        n: u64,
        eps: f64,
    },
    Karmed {
        k: u64,
    },
    Separation,
    /// 9x the monotone eluder dimension, at gap rescale 3*eps/2.
    EluderFactor {
        eluder_dim: u64,
    },
}

pub fn dim_bound(family: DimBoundFamily) -> Result<DimBound> {
    Ok(match family {
        DimBoundFamily::Linear { n, alpha_is_one } => DimBound::Exact {
            value: if alpha_is_one {
                (2 * n + 1) as f64
            } else {
                (4 * n + 3) as f64
            },
        },
        DimBoundFamily::Glm { n, r, h_upper, eps } => {
            if eps <= 0.0 || r < 1.0 {
                return Err(Error::invalid("need eps > 0 and r >= 1"));
            }
            DimBound::Asymptotic {
                expression: "n * r^2 * log(h_upper/eps), constant unspecified".into(),
                scale: n as f64 * r * r * (h_upper / eps).ln(),
            }
        }
        DimBoundFamily::Relu { n, eps } => {
            if eps <= 0.0 {
                return Err(Error::invalid("need eps > 0"));
            }
            DimBound::Asymptotic {
                expression: "eps^(-n/2), constant unspecified".into(),
                scale: eps.powf(-(n as f64) / 2.0),
            }
        }
        DimBoundFamily::Karmed { k } => DimBound::Exact { value: k as f64 },
        DimBoundFamily::Separation => DimBound::Exact { value: 16.0 },
        DimBoundFamily::EluderFactor { eluder_dim } => DimBound::Exact {
            value: 9.0 * eluder_dim as f64,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HelperKind {
    Sqrt,
    Log,
}

/// The two summation helpers: T*tau + 2*sqrt(kappa(tau)*T) for counting
/// functions of shape kappa/eps^2, and T*tau + a*(1+kappa)*exp(-1/kappa)
/// for the logarithmic shape.
pub fn helper_sum_bound(
    kind: HelperKind,
    kappa_tau: f64,
    tau: f64,
    t_steps: u64,
    a: f64,
) -> Result<f64> {
    if t_steps == 0 {
        return Err(Error::invalid("T must be at least 1"));
    }
    if kappa_tau < 0.0 || tau < 0.0 {
        return Err(Error::invalid("kappa and tau must be nonnegative"));
    }
    let t = t_steps as f64;
    Ok(match kind {
        HelperKind::Sqrt => t * tau + 2.0 * (kappa_tau * t).sqrt(),
        HelperKind::Log => {
            if kappa_tau <= 0.0 {
                return Err(Error::invalid("log kind requires kappa > 0"));
            }
            if a <= 0.0 {
                return Err(Error::invalid("log kind requires a > 0"));
            }
            t * tau + a * (1.0 + kappa_tau) * (-1.0 / kappa_tau).exp()
        }
    })
}
