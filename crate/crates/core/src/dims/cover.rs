//! Covers of Z under the pseudometric
//! psi(z1, z2) = max_z |rho(z|z1) - rho(z|z2)|.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{AlternativeId, Instance};

/// Largest instance the exact minimum-cover search accepts.
pub const EXACT_COVER_CAP: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsiCoverReport {
    pub epsilon: f64,
    pub cover: Vec<AlternativeId>,
    pub size: usize,
    /// False for the greedy upper bound, true for the exhaustive minimum.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Greedy,
    Exact,
}

/// psi distance between two alternatives.
pub fn psi_distance(instance: &Instance, z1: AlternativeId, z2: AlternativeId) -> f64 {
    let mut worst = 0.0f64;
    for z in 0..instance.len() {
        let d = (instance.eval_unchecked(z, z1.0) - instance.eval_unchecked(z, z2.0)).abs();
        worst = worst.max(d);
    }
    worst
}

fn psi_matrix(instance: &Instance) -> Vec<Vec<f64>> {
    let n = instance.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = psi_distance(instance, AlternativeId(i), AlternativeId(j));
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

fn greedy_cover(dist: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let n = dist.len();
    let mut cover = vec![0usize];
    loop {
        // farthest point from the current cover
        let mut far = None;
        let mut far_d = eps;
        for z in 0..n {
            let d = cover
                .iter()
                .map(|&c| dist[z][c])
                .fold(f64::INFINITY, f64::min);
            if d > far_d {
                far_d = d;
                far = Some(z);
            }
        }
        match far {
            Some(z) => cover.push(z),
            None => return cover,
        }
    }
}

fn exact_cover(dist: &[Vec<f64>], eps: f64, greedy_seed: &[usize]) -> Vec<usize> {
    let n = dist.len();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let balls: Vec<u32> = (0..n)
        .map(|c| {
            let mut mask = 0u32;
            for z in 0..n {
                if dist[z][c] <= eps {
                    mask |= 1 << z;
                }
            }
            mask
        })
        .collect();
    // The greedy cover is valid, so it seeds the bound; the search only
    // replaces it with strictly smaller covers.
    let mut best: Vec<usize> = greedy_seed.to_vec();
    let mut chosen = Vec::new();
    fn go(balls: &[u32], full: u32, covered: u32, chosen: &mut Vec<usize>, best: &mut Vec<usize>) {
        if covered == full {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        if chosen.len() + 1 >= best.len() {
            return;
        }
        // branch on the uncovered element with the fewest covering balls
        let mut pick = None;
        let mut pick_count = usize::MAX;
        for z in 0..balls.len() {
            if covered & (1 << z) != 0 {
                continue;
            }
            let count = balls.iter().filter(|&&b| b & (1 << z) != 0).count();
            if count < pick_count {
                pick_count = count;
                pick = Some(z);
            }
        }
        let z = pick.expect("some element uncovered");
        for (c, &b) in balls.iter().enumerate() {
            if b & (1 << z) != 0 {
                chosen.push(c);
                go(balls, full, covered | b, chosen, best);
                chosen.pop();
            }
        }
    }
    go(&balls, full, 0, &mut chosen, &mut best);
    best
}

/// Cover report for Z at radius `epsilon`. Greedy mode returns a
/// farthest-point cover whose size upper-bounds the true covering number;
/// exact mode (|Z| <= 20) returns a minimum cover.
pub fn covering_number(
    instance: &Instance,
    epsilon: f64,
    mode: CoverMode,
) -> Result<PsiCoverReport> {
    if epsilon < 0.0 {
        return Err(Error::invalid("epsilon must be nonnegative"));
    }
    let n = instance.len();
    let dist = psi_matrix(instance);
    let greedy = greedy_cover(&dist, epsilon);
    let (cover, exact) = match mode {
        CoverMode::Greedy => (greedy, false),
        CoverMode::Exact => {
            if n > EXACT_COVER_CAP {
                return Err(Error::SizeCap {
                    what: "exact cover search".into(),
                    requested: n,
                    cap: EXACT_COVER_CAP,
                });
            }
            (exact_cover(&dist, epsilon, &greedy), true)
        }
    };
    Ok(PsiCoverReport {
        epsilon,
        size: cover.len(),
        cover: cover.into_iter().map(AlternativeId).collect(),
        exact,
    })
}
