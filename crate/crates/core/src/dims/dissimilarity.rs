//! Exact dissimilarity-dimension search.
//!
//! "Dimension >= d" is decided with the tolerance epsilon/sqrt(d) of that
//! specific target length, so the overall value is found by descending
//! from the largest possible length; the first feasible length wins
//! (prefixes of feasible sequences are feasible at the same tolerance, so
//! feasibility is monotone in the length). The search is a depth-first
//! branch-and-bound over ordered sequences: a prefix is pruned as soon as
//! no center can serve its pair values, and a branch dies when the
//! surviving candidates cannot reach the target length. When rho is
//! symmetric on the candidate set, order is irrelevant and the search
//! walks ascending-index combinations only.

use crate::dims::certificate::DimensionCertificate;
use crate::error::{Error, Result};
use crate::protocol::{AlternativeId, Instance};

/// A center c with |v - c| <= tolerance for every v and c <= cap, iff one
/// exists. An empty value list leaves only the cap constraint.
pub fn feasible_center(pair_values: &[f64], tolerance: f64, cap: f64) -> Option<f64> {
    if pair_values.is_empty() {
        return Some(cap);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in pair_values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo <= 2.0 * tolerance && hi - tolerance <= cap {
        Some((lo + tolerance).min(cap))
    } else {
        None
    }
}

struct Search<'a> {
    instance: &'a Instance,
    tol: f64,
    cap: f64,
    target: usize,
    symmetric: bool,
}

impl Search<'_> {
    fn rho(&self, left: usize, right: usize) -> f64 {
        self.instance.eval_unchecked(left, right)
    }

    fn go(
        &self,
        chosen: &mut Vec<usize>,
        vmin: f64,
        vmax: f64,
        cands: &[usize],
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.target {
            return Some(chosen.clone());
        }
        // Filter the candidates that keep a feasible center after their
        // incoming pair values are merged.
        let mut viable: Vec<(usize, f64, f64)> = Vec::with_capacity(cands.len());
        'next: for &z in cands {
            let mut nmin = vmin;
            let mut nmax = vmax;
            for &c in chosen.iter() {
                let v = self.rho(c, z);
                nmin = nmin.min(v);
                nmax = nmax.max(v);
                if nmax - nmin > 2.0 * self.tol || nmax - self.tol > self.cap {
                    continue 'next;
                }
            }
            viable.push((z, nmin, nmax));
        }
        if chosen.len() + viable.len() < self.target {
            return None;
        }
        for i in 0..viable.len() {
            // In the symmetric case the search walks ascending-index
            // combinations, so candidates before i are spent and the
            // remaining count shrinks with the loop. In the ordered case
            // they stay available deeper and only the node-level count
            // above may prune.
            if self.symmetric && chosen.len() + (viable.len() - i) < self.target {
                return None;
            }
            let (z, nmin, nmax) = viable[i];
            chosen.push(z);
            let rest: Vec<usize> = if self.symmetric {
                viable[i + 1..].iter().map(|t| t.0).collect()
            } else {
                viable
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, t)| t.0)
                    .collect()
            };
            if let Some(seq) = self.go(chosen, nmin, nmax, &rest) {
                return Some(seq);
            }
            chosen.pop();
        }
        None
    }
}

fn is_symmetric(instance: &Instance, members: &[usize]) -> bool {
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if instance.eval_unchecked(a, b) != instance.eval_unchecked(b, a) {
                return false;
            }
        }
    }
    true
}

fn certificate_for(
    instance: &Instance,
    seq: &[usize],
    alpha: f64,
    epsilon: f64,
) -> DimensionCertificate {
    let d = seq.len();
    let tol = epsilon / (d as f64).sqrt();
    let mut vals = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            vals.push(instance.eval_unchecked(seq[i], seq[j]));
        }
    }
    let center = feasible_center(&vals, tol, alpha - epsilon)
        .expect("search returned an infeasible sequence");
    DimensionCertificate::Dissimilarity {
        sequence: seq.iter().map(|&z| AlternativeId(z)).collect(),
        center_c: center,
        epsilon,
        alpha,
        value: d,
    }
}

/// Exact dimension over the whole instance.
pub fn dissimilarity_dim(
    instance: &Instance,
    alpha: f64,
    epsilon: f64,
) -> Result<(usize, Option<DimensionCertificate>)> {
    let all: Vec<usize> = (0..instance.len()).collect();
    dissimilarity_dim_within(instance, &all, alpha, epsilon)
}

/// Exact dimension restricted to a sub-instance given by `subset`.
pub fn dissimilarity_dim_within(
    instance: &Instance,
    subset: &[usize],
    alpha: f64,
    epsilon: f64,
) -> Result<(usize, Option<DimensionCertificate>)> {
    if epsilon <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if subset.iter().any(|&z| z >= instance.len()) {
        return Err(Error::invalid("subset index outside the instance"));
    }
    let members: Vec<usize> = subset
        .iter()
        .copied()
        .filter(|&z| instance.eval_unchecked(z, z) >= alpha)
        .collect();
    if members.is_empty() {
        return Ok((0, None));
    }
    let symmetric = is_symmetric(instance, &members);
    let cap = alpha - epsilon;
    for len in (1..=members.len()).rev() {
        let search = Search {
            instance,
            tol: epsilon / (len as f64).sqrt(),
            cap,
            target: len,
            symmetric,
        };
        let mut chosen = Vec::with_capacity(len);
        if let Some(seq) = search.go(&mut chosen, f64::INFINITY, f64::NEG_INFINITY, &members) {
            return Ok((len, Some(certificate_for(instance, &seq, alpha, epsilon))));
        }
    }
    unreachable!("length 1 is always feasible on a nonempty member set")
}

/// Geometric default grid for the monotone dimension: eps * 1.2^k capped
/// at 1 + alpha. Reported values are lower bounds on the true supremum.
pub fn default_epsilon_grid(epsilon: f64, alpha: f64) -> Vec<f64> {
    let cap = 1.0 + alpha;
    let mut grid = Vec::new();
    let mut x = epsilon;
    while x <= cap {
        grid.push(x);
        x *= 1.2;
    }
    if grid.is_empty() {
        grid.push(epsilon);
    }
    grid
}

/// Max of the plain dimension over the gap grid; ties prefer the larger
/// gap. The result is a grid lower bound on the monotone dimension.
pub fn monotone_dissimilarity_dim(
    instance: &Instance,
    alpha: f64,
    epsilon: f64,
    grid: &[f64],
) -> Result<(usize, f64, Option<DimensionCertificate>)> {
    let all: Vec<usize> = (0..instance.len()).collect();
    monotone_dissimilarity_dim_within(instance, &all, alpha, epsilon, grid)
}

pub fn monotone_dissimilarity_dim_within(
    instance: &Instance,
    subset: &[usize],
    alpha: f64,
    epsilon: f64,
    grid: &[f64],
) -> Result<(usize, f64, Option<DimensionCertificate>)> {
    if grid.is_empty() {
        return Err(Error::invalid("gap grid must be nonempty"));
    }
    if grid.iter().any(|&g| g < epsilon - 1e-12) {
        return Err(Error::invalid("gap grid values must be >= epsilon"));
    }
    let mut best = 0usize;
    let mut best_eps = grid[0];
    let mut best_cert = None;
    for &g in grid {
        let (d, cert) = dissimilarity_dim_within(instance, subset, alpha, g)?;
        if d >= best {
            best = d;
            best_eps = g;
            best_cert = cert;
        }
    }
    Ok((best, best_eps, best_cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::certificate::verify_dissimilarity_certificate;
    use crate::instances;
    use crate::protocol::{AltPayload, Metadata, NoiseMode};

    fn dense(table: Vec<f64>, n: usize, target: usize) -> Instance {
        Instance::from_dense(
            vec![AltPayload::None; n],
            table,
            AlternativeId(target),
            NoiseMode::Deterministic,
            Metadata::default(),
        )
        .unwrap()
    }

    #[test]
    fn feasible_center_examples() {
        // point intersection: spread exactly 2*tolerance (dyadic values so
        // the exact comparison sees equality)
        assert_eq!(feasible_center(&[0.125, 0.25], 0.0625, 0.25), Some(0.1875));
        // spread 0.3 exceeds 2*0.1
        assert_eq!(feasible_center(&[0.0, 0.3], 0.1, 1.0), None);
        // exact coincidence against a binding cap
        assert_eq!(feasible_center(&[-0.5, -0.5], 0.0, -0.5), Some(-0.5));
        // vacuous constraints return the cap
        assert_eq!(feasible_center(&[], 0.1, 0.7), Some(0.7));
    }

    #[test]
    fn singleton_dimension_is_one() {
        let inst = dense(vec![1.0], 1, 0);
        let (d, cert) = dissimilarity_dim(&inst, 1.0, 0.5).unwrap();
        assert_eq!(d, 1);
        verify_dissimilarity_certificate(&cert.unwrap(), &inst).unwrap();
    }

    #[test]
    fn empty_constraint_set_gives_zero() {
        let inst = dense(vec![0.4], 1, 0);
        let (d, cert) = dissimilarity_dim(&inst, 0.9, 0.5).unwrap();
        assert_eq!(d, 0);
        assert!(cert.is_none());
    }

    #[test]
    fn hard_diagonal_subset_reaches_full_length() {
        // the four (f_i, x_i) pairs of a 4-point indicator instance: all
        // cross evaluations are exactly -eps, so at gap 1.0 the whole
        // subset is a feasible sequence with center -0.5.
        let pair = instances::make_hard_indicator(4, 0.5, 16, 2).unwrap();
        let hard = &pair.hard;
        let subset: Vec<usize> = (0..4)
            .map(|i| hard.id_of_pair(i, pair.context.special_acts[i]).unwrap().0)
            .collect();
        let (d, cert) = dissimilarity_dim_within(hard, &subset, 0.5, 1.0).unwrap();
        assert_eq!(d, 4);
        let cert = cert.unwrap();
        match &cert {
            DimensionCertificate::Dissimilarity { center_c, .. } => {
                assert_eq!(*center_c, -0.5);
            }
            _ => unreachable!(),
        }
        verify_dissimilarity_certificate(&cert, hard).unwrap();
    }

    #[test]
    fn karmed_dimension_at_most_k() {
        let inst =
            instances::make_karmed(&[0.9, 0.3, 0.6], 3, 256, NoiseMode::Deterministic).unwrap();
        for alpha in [0.5, 0.75] {
            let (d, _) = dissimilarity_dim(&inst, alpha, 0.4).unwrap();
            assert!(d <= 3, "alpha {alpha} gave d = {d}");
        }
    }

    #[test]
    fn monotone_singleton_grid_equals_plain() {
        let inst = dense(vec![1.0, 0.0, 0.0, 1.0], 2, 0);
        let (d, _) = dissimilarity_dim(&inst, 0.5, 0.4).unwrap();
        let (dm, eps, _) = monotone_dissimilarity_dim(&inst, 0.5, 0.4, &[0.4]).unwrap();
        assert_eq!(d, dm);
        assert_eq!(eps, 0.4);
    }

    #[test]
    fn monotone_prefers_larger_gap_on_ties() {
        let pair = instances::make_hard_indicator(4, 0.5, 16, 2).unwrap();
        let hard = &pair.hard;
        let subset: Vec<usize> = (0..4)
            .map(|i| hard.id_of_pair(i, pair.context.special_acts[i]).unwrap().0)
            .collect();
        let (d, eps, cert) =
            monotone_dissimilarity_dim_within(hard, &subset, 0.5, 0.5, &[0.5, 1.0]).unwrap();
        assert_eq!(d, 4);
        assert_eq!(eps, 1.0);
        verify_dissimilarity_certificate(&cert.unwrap(), hard).unwrap();
    }

    #[test]
    fn monotone_takes_the_best_gap() {
        // Pair values 0.0 / 0.2 / 0.4 spread wider than the length-3
        // tolerance at gap eps but inside it at gap 2*eps, so the plain
        // dimension is 2 while the doubled gap reaches 3.
        let alpha = 0.8;
        let eps = 0.2;
        let table = vec![
            0.8, 0.0, 0.4, //
            0.0, 0.8, 0.2, //
            0.4, 0.2, 0.8,
        ];
        let inst = dense(table, 3, 0);
        let (d1, _) = dissimilarity_dim(&inst, alpha, eps).unwrap();
        assert_eq!(d1, 2);
        let (dm, at, _) = monotone_dissimilarity_dim(&inst, alpha, eps, &[eps, 2.0 * eps]).unwrap();
        assert_eq!(dm, 3);
        assert_eq!(at, 2.0 * eps);
    }

    #[test]
    fn empty_grid_is_invalid() {
        let inst = dense(vec![1.0], 1, 0);
        assert!(monotone_dissimilarity_dim(&inst, 1.0, 0.5, &[]).is_err());
    }

    #[test]
    fn default_grid_is_geometric_and_capped() {
        let grid = default_epsilon_grid(0.25, 1.0);
        assert_eq!(grid[0], 0.25);
        assert!(grid.iter().all(|&g| g <= 2.0));
        assert!(grid.windows(2).all(|w| (w[1] / w[0] - 1.2).abs() < 1e-12));
    }
}
