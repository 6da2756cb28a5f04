//! Witness certificates and their independent checkers.
//!
//! The checkers re-derive every condition by direct arithmetic on the
//! supplied tables; they share no code with the searches that produced
//! the certificates. A 1e-12 absolute slack absorbs the rounding of the
//! center computation, nothing more.

use serde::{Deserialize, Serialize};

use crate::protocol::{AlternativeId, Instance};

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimensionCertificate {
    /// Ordered sequence with a center scalar: every element has
    /// self-evaluation >= alpha, c <= alpha - epsilon, and
    /// |rho(z_i|z_j) - c| <= epsilon/sqrt(d) for all i < j.
    Dissimilarity {
        sequence: Vec<AlternativeId>,
        center_c: f64,
        epsilon: f64,
        alpha: f64,
        value: usize,
    },
    /// Ordered action sequence where each step stores the function pair
    /// that agrees within epsilon on the predecessors yet differs by more
    /// than epsilon on the action itself.
    Eluder {
        sequence: Vec<usize>,
        witnesses: Vec<(usize, usize)>,
        epsilon: f64,
        value: usize,
    },
    /// Unordered hypothesis subset with pairwise correlations bounded away
    /// from +/-1 and mutually within 1/d of each other.
    StrongSq {
        subset: Vec<usize>,
        epsilon: f64,
        value: usize,
    },
}

impl DimensionCertificate {
    pub fn value(&self) -> usize {
        match self {
            DimensionCertificate::Dissimilarity { value, .. }
            | DimensionCertificate::Eluder { value, .. }
            | DimensionCertificate::StrongSq { value, .. } => *value,
        }
    }
}

fn all_distinct(xs: &[usize]) -> bool {
    let mut seen = xs.to_vec();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

pub fn verify_dissimilarity_certificate(
    cert: &DimensionCertificate,
    instance: &Instance,
) -> Result<(), String> {
    let DimensionCertificate::Dissimilarity {
        sequence,
        center_c,
        epsilon,
        alpha,
        value,
    } = cert
    else {
        return Err("not a dissimilarity certificate".into());
    };
    if sequence.len() != *value || *value == 0 {
        return Err(format!(
            "certificate value {value} does not match sequence length {}",
            sequence.len()
        ));
    }
    let ids: Vec<usize> = sequence.iter().map(|z| z.0).collect();
    if !all_distinct(&ids) {
        return Err("sequence repeats an element".into());
    }
    if ids.iter().any(|&z| z >= instance.len()) {
        return Err("sequence element outside the instance".into());
    }
    if *center_c > *alpha - *epsilon + SLACK {
        return Err(format!("center {center_c} exceeds alpha - epsilon"));
    }
    let tol = *epsilon / (*value as f64).sqrt();
    for i in 0..ids.len() {
        let self_eval = instance.eval_unchecked(ids[i], ids[i]);
        if self_eval < *alpha {
            return Err(format!(
                "element {} has self-evaluation {self_eval} < alpha {alpha}",
                ids[i]
            ));
        }
        for j in (i + 1)..ids.len() {
            let v = instance.eval_unchecked(ids[i], ids[j]);
            if (v - center_c).abs() > tol + SLACK {
                return Err(format!(
                    "pair ({}, {}) value {v} strays {} from center {center_c}, tolerance {tol}",
                    ids[i],
                    ids[j],
                    (v - center_c).abs()
                ));
            }
        }
    }
    Ok(())
}

pub fn verify_eluder_certificate(
    cert: &DimensionCertificate,
    f_values: &[Vec<f64>],
) -> Result<(), String> {
    let DimensionCertificate::Eluder {
        sequence,
        witnesses,
        epsilon,
        value,
    } = cert
    else {
        return Err("not an eluder certificate".into());
    };
    if sequence.len() != *value || witnesses.len() != *value {
        return Err("certificate value does not match sequence/witness lengths".into());
    }
    if !all_distinct(sequence) {
        return Err("action sequence repeats an element".into());
    }
    let acts = f_values.first().map(|r| r.len()).unwrap_or(0);
    for (k, (&a, &(f, f2))) in sequence.iter().zip(witnesses).enumerate() {
        if a >= acts || f >= f_values.len() || f2 >= f_values.len() {
            return Err("certificate index outside the table".into());
        }
        let mut sum = 0.0;
        for &prev in &sequence[..k] {
            let d = f_values[f][prev] - f_values[f2][prev];
            sum += d * d;
        }
        if sum.sqrt() > *epsilon + SLACK {
            return Err(format!(
                "witness pair at step {k} disagrees on predecessors: {} > {epsilon}",
                sum.sqrt()
            ));
        }
        if (f_values[f][a] - f_values[f2][a]).abs() <= *epsilon {
            return Err(format!(
                "witness pair at step {k} does not separate action {a}"
            ));
        }
    }
    Ok(())
}

pub fn verify_strong_sq_certificate(
    cert: &DimensionCertificate,
    hypotheses: &[Vec<i8>],
    dist: &[f64],
) -> Result<(), String> {
    let DimensionCertificate::StrongSq {
        subset,
        epsilon,
        value,
    } = cert
    else {
        return Err("not a strong SQ certificate".into());
    };
    if subset.len() != *value || *value == 0 {
        return Err("certificate value does not match subset size".into());
    }
    if !all_distinct(subset) {
        return Err("subset repeats a hypothesis".into());
    }
    if subset.iter().any(|&h| h >= hypotheses.len()) {
        return Err("subset element outside the class".into());
    }
    let inner = |a: usize, b: usize| -> f64 {
        dist.iter()
            .enumerate()
            .map(|(x, &p)| p * f64::from(hypotheses[a][x] * hypotheses[b][x]))
            .sum()
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..subset.len() {
        for j in (i + 1)..subset.len() {
            let g = inner(subset[i], subset[j]);
            if g.abs() > 1.0 - *epsilon + SLACK {
                return Err(format!(
                    "pair ({}, {}) correlation {g} violates |.| <= 1 - epsilon",
                    subset[i], subset[j]
                ));
            }
            lo = lo.min(g);
            hi = hi.max(g);
        }
    }
    if subset.len() >= 2 && hi - lo > 1.0 / *value as f64 + SLACK {
        return Err(format!(
            "pairwise spread {} exceeds 1/d = {}",
            hi - lo,
            1.0 / *value as f64
        ));
    }
    Ok(())
}
