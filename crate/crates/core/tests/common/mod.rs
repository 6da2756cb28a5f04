//! Shared test helpers: naive enumeration oracles for the three
//! dimensions (independent of the pruned searches — every ordered subset
//! is generated and validated from scratch at the leaf) and random
//! fixture builders on coarse value grids.

#![allow(dead_code)]

use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use dissim::protocol::{AltPayload, AlternativeId, Instance, Metadata, NoiseMode};

/// All ordered selections of `len` items from `pool`, streamed to `visit`
/// until it returns true (found).
fn any_permutation<F: FnMut(&[usize]) -> bool>(pool: &[usize], len: usize, visit: &mut F) -> bool {
    fn rec<F: FnMut(&[usize]) -> bool>(
        pool: &[usize],
        used: &mut Vec<bool>,
        seq: &mut Vec<usize>,
        len: usize,
        visit: &mut F,
    ) -> bool {
        if seq.len() == len {
            return visit(seq);
        }
        for i in 0..pool.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            seq.push(pool[i]);
            if rec(pool, used, seq, len, visit) {
                return true;
            }
            seq.pop();
            used[i] = false;
        }
        false
    }
    let mut used = vec![false; pool.len()];
    let mut seq = Vec::with_capacity(len);
    rec(pool, &mut used, &mut seq, len, visit)
}

/// All ascending-index subsets of size `len`.
fn any_combination<F: FnMut(&[usize]) -> bool>(pool: &[usize], len: usize, visit: &mut F) -> bool {
    fn rec<F: FnMut(&[usize]) -> bool>(
        pool: &[usize],
        start: usize,
        seq: &mut Vec<usize>,
        len: usize,
        visit: &mut F,
    ) -> bool {
        if seq.len() == len {
            return visit(seq);
        }
        for i in start..pool.len() {
            seq.push(pool[i]);
            if rec(pool, i + 1, seq, len, visit) {
                return true;
            }
            seq.pop();
        }
        false
    }
    let mut seq = Vec::with_capacity(len);
    rec(pool, 0, &mut seq, len, visit)
}

pub fn naive_dissimilarity_dim(inst: &Instance, alpha: f64, eps: f64) -> usize {
    let members: Vec<usize> = (0..inst.len())
        .filter(|&z| {
            dissim::protocol::evaluate(inst, AlternativeId(z), AlternativeId(z)).unwrap() >= alpha
        })
        .collect();
    if members.is_empty() {
        return 0;
    }
    let value = |i: usize, j: usize| {
        dissim::protocol::evaluate(inst, AlternativeId(i), AlternativeId(j)).unwrap()
    };
    for len in (1..=members.len()).rev() {
        let tol = eps / (len as f64).sqrt();
        let cap = alpha - eps;
        let mut check = |seq: &[usize]| -> bool {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..seq.len() {
                for j in (i + 1)..seq.len() {
                    let v = value(seq[i], seq[j]);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            if seq.len() < 2 {
                return true;
            }
            hi - lo <= 2.0 * tol && hi - tol <= cap
        };
        if any_permutation(&members, len, &mut check) {
            return len;
        }
    }
    unreachable!()
}

pub fn naive_eluder_dim(values: &[Vec<f64>], eps: f64) -> usize {
    let acts: Vec<usize> = (0..values[0].len()).collect();
    let valid = |seq: &[usize]| -> bool {
        for (k, &a) in seq.iter().enumerate() {
            let mut independent = false;
            for f in 0..values.len() {
                for f2 in (f + 1)..values.len() {
                    let sum: f64 = seq[..k]
                        .iter()
                        .map(|&p| (values[f][p] - values[f2][p]).powi(2))
                        .sum();
                    if sum.sqrt() <= eps && (values[f][a] - values[f2][a]).abs() > eps {
                        independent = true;
                        break;
                    }
                }
                if independent {
                    break;
                }
            }
            if !independent {
                return false;
            }
        }
        true
    };
    for len in (1..=acts.len()).rev() {
        let mut check = |seq: &[usize]| valid(seq);
        if any_permutation(&acts, len, &mut check) {
            return len;
        }
    }
    0
}

pub fn naive_strong_sq_dim(hyps: &[Vec<i8>], dist: &[f64], eps: f64) -> usize {
    let inner = |a: usize, b: usize| -> f64 {
        dist.iter()
            .enumerate()
            .map(|(x, &p)| p * f64::from(hyps[a][x] * hyps[b][x]))
            .sum()
    };
    let pool: Vec<usize> = (0..hyps.len()).collect();
    for len in (1..=hyps.len()).rev() {
        let mut check = |set: &[usize]| -> bool {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..set.len() {
                for j in (i + 1)..set.len() {
                    let g = inner(set[i], set[j]);
                    if g.abs() > 1.0 - eps {
                        return false;
                    }
                    lo = lo.min(g);
                    hi = hi.max(g);
                }
            }
            set.len() < 2 || hi - lo <= 1.0 / len as f64
        };
        if any_combination(&pool, len, &mut check) {
            return len;
        }
    }
    0
}

/// Coarse-grid value in [-1, 1] (quarters), fp-exact.
pub fn grid_value(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-4i32..=4) as f64 / 4.0
}

/// Random dense instance on the quarter grid; the target's diagonal is
/// lifted to its column max so construction invariants hold.
pub fn random_dense_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let mut table: Vec<f64> = (0..n * n).map(|_| grid_value(rng)).collect();
    let target = rng.random_range(0..n);
    let col_max = (0..n)
        .map(|z| table[z * n + target])
        .fold(f64::NEG_INFINITY, f64::max);
    table[target * n + target] = col_max;
    Instance::from_dense(
        vec![AltPayload::None; n],
        table,
        AlternativeId(target),
        NoiseMode::TwoPoint,
        Metadata::new("random_dense", serde_json::Value::Null),
    )
    .expect("grid tables are valid")
}

/// Random product table with nonnegative quarter-grid values.
pub fn random_product_values(rng: &mut ChaCha8Rng, funcs: usize, acts: usize) -> Vec<Vec<f64>> {
    (0..funcs)
        .map(|_| {
            (0..acts)
                .map(|_| rng.random_range(0i32..=4) as f64 / 4.0)
                .collect()
        })
        .collect()
}

/// Random +/-1 hypothesis table.
pub fn random_hypotheses(rng: &mut ChaCha8Rng, classes: usize, domain: usize) -> Vec<Vec<i8>> {
    (0..classes)
        .map(|_| {
            (0..domain)
                .map(|_| if rng.random::<bool>() { 1i8 } else { -1 })
                .collect()
        })
        .collect()
}
