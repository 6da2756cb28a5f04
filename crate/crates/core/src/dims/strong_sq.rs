//! Exact strong SQ dimension over a finite +/-1 hypothesis table.
//!
//! Both conditions are symmetric in the pair, so the search runs over
//! unordered subsets (ascending index), with the same target-size
//! feasibility structure as the dissimilarity search: the 1/d spread
//! threshold depends on the candidate size, so each size is tested on
//! the way down and the first feasible size wins.

use crate::dims::certificate::DimensionCertificate;
use crate::error::{Error, Result};
use crate::instances::validate_dist;

struct Search<'a> {
    gram: &'a [Vec<f64>],
    corr_cap: f64,
    spread: f64,
    target: usize,
}

impl Search<'_> {
    fn go(
        &self,
        chosen: &mut Vec<usize>,
        gmin: f64,
        gmax: f64,
        cands: &[usize],
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.target {
            return Some(chosen.clone());
        }
        let mut viable: Vec<(usize, f64, f64)> = Vec::with_capacity(cands.len());
        'next: for &h in cands {
            let mut nmin = gmin;
            let mut nmax = gmax;
            for &c in chosen.iter() {
                let g = self.gram[c][h];
                if g.abs() > self.corr_cap {
                    continue 'next;
                }
                nmin = nmin.min(g);
                nmax = nmax.max(g);
                if nmax - nmin > self.spread {
                    continue 'next;
                }
            }
            viable.push((h, nmin, nmax));
        }
        if chosen.len() + viable.len() < self.target {
            return None;
        }
        for i in 0..viable.len() {
            if chosen.len() + (viable.len() - i) < self.target {
                return None;
            }
            let (h, nmin, nmax) = viable[i];
            chosen.push(h);
            let rest: Vec<usize> = viable[i + 1..].iter().map(|t| t.0).collect();
            if let Some(set) = self.go(chosen, nmin, nmax, &rest) {
                return Some(set);
            }
            chosen.pop();
        }
        None
    }
}

pub fn gram_matrix(hypotheses: &[Vec<i8>], dist: &[f64]) -> Vec<Vec<f64>> {
    let m = hypotheses.len();
    let mut gram = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = dist
                .iter()
                .enumerate()
                .map(|(x, &p)| p * f64::from(hypotheses[i][x] * hypotheses[j][x]))
                .sum();
        }
    }
    gram
}

/// Largest subset with |<h_i,h_j>| <= 1 - epsilon for all pairs and
/// pairwise spread at most 1/d.
pub fn strong_sq_dim(
    hypotheses: &[Vec<i8>],
    dist: &[f64],
    epsilon: f64,
) -> Result<(usize, Option<DimensionCertificate>)> {
    if epsilon <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    validate_dist(dist)?;
    if hypotheses.iter().any(|h| h.len() != dist.len()) {
        return Err(Error::invalid("hypothesis rows must match the domain size"));
    }
    if hypotheses.is_empty() {
        return Ok((0, None));
    }
    let gram = gram_matrix(hypotheses, dist);
    let all: Vec<usize> = (0..hypotheses.len()).collect();
    for size in (1..=hypotheses.len()).rev() {
        let search = Search {
            gram: &gram,
            corr_cap: 1.0 - epsilon,
            spread: 1.0 / size as f64,
            target: size,
        };
        let mut chosen = Vec::with_capacity(size);
        if let Some(subset) = search.go(&mut chosen, f64::INFINITY, f64::NEG_INFINITY, &all) {
            return Ok((
                size,
                Some(DimensionCertificate::StrongSq {
                    subset,
                    epsilon,
                    value: size,
                }),
            ));
        }
    }
    unreachable!("size 1 is always feasible on a nonempty class")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::certificate::verify_strong_sq_certificate;

    #[test]
    fn anticorrelated_pair_caps_at_one() {
        let h = vec![1i8, 1, -1, -1];
        let neg: Vec<i8> = h.iter().map(|v| -v).collect();
        let hyps = vec![h, neg];
        let dist = vec![0.25; 4];
        let (d, cert) = strong_sq_dim(&hyps, &dist, 0.5).unwrap();
        assert_eq!(d, 1);
        verify_strong_sq_certificate(&cert.unwrap(), &hyps, &dist).unwrap();
    }

    #[test]
    fn orthogonal_pair_reaches_two() {
        let hyps = vec![vec![1i8, 1, -1, -1], vec![1, -1, 1, -1]];
        let dist = vec![0.25; 4];
        let (d, cert) = strong_sq_dim(&hyps, &dist, 0.5).unwrap();
        assert_eq!(d, 2);
        verify_strong_sq_certificate(&cert.unwrap(), &hyps, &dist).unwrap();
    }

    #[test]
    fn pairwise_orthogonal_family_reaches_its_size() {
        // four Walsh rows on eight uniform points: all pairwise
        // correlations are exactly zero, so the whole class qualifies
        let hyps = vec![
            vec![1i8, 1, 1, 1, 1, 1, 1, 1],
            vec![1, 1, 1, 1, -1, -1, -1, -1],
            vec![1, 1, -1, -1, 1, 1, -1, -1],
            vec![1, -1, 1, -1, 1, -1, 1, -1],
        ];
        let dist = vec![0.125; 8];
        let (d, cert) = strong_sq_dim(&hyps, &dist, 0.5).unwrap();
        assert_eq!(d, 4);
        verify_strong_sq_certificate(&cert.unwrap(), &hyps, &dist).unwrap();
    }

    #[test]
    fn correlation_above_threshold_blocks_the_pair() {
        // agree on 8 of 10 uniform points: inner product 0.6 > 1 - 0.5
        let h1 = vec![1i8; 10];
        let mut h2 = vec![1i8; 10];
        h2[0] = -1;
        h2[1] = -1;
        let hyps = vec![h1, h2];
        let dist = vec![0.1; 10];
        let (d, _) = strong_sq_dim(&hyps, &dist, 0.5).unwrap();
        assert_eq!(d, 1);
    }

    #[test]
    fn invalid_distribution_is_rejected() {
        assert!(strong_sq_dim(&[vec![1, -1]], &[0.9, 0.3], 0.5).is_err());
    }
}
