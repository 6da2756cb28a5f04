//! Exact eluder-dimension search over a finite (function, action) table.
//!
//! A sequence extends by an action that some pair of functions separates
//! by more than epsilon while agreeing within epsilon (root sum of
//! squares) on the predecessors. Adding predecessors only removes
//! agreeing pairs, so candidates that lose every witness are dropped for
//! the rest of the branch, and a branch dies when the survivors cannot
//! beat the best length found so far.

use crate::dims::certificate::DimensionCertificate;
use crate::error::{Error, Result};

struct PairState {
    f: usize,
    f2: usize,
    /// Sum of squared differences over the chosen actions.
    sum: f64,
}

struct Search<'a> {
    values: &'a [Vec<f64>],
    eps: f64,
    best: Vec<(usize, (usize, usize))>,
}

impl Search<'_> {
    fn witness(&self, live: &[PairState], action: usize) -> Option<(usize, usize)> {
        live.iter()
            .find(|p| (self.values[p.f][action] - self.values[p.f2][action]).abs() > self.eps)
            .map(|p| (p.f, p.f2))
    }

    fn go(
        &mut self,
        chosen: &mut Vec<(usize, (usize, usize))>,
        live: &[PairState],
        cands: &[usize],
    ) {
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        if chosen.len() + cands.len() <= self.best.len() {
            return;
        }
        // No per-index pruning here: candidates earlier in the loop stay
        // available deeper in the subtree (sequences are ordered), so only
        // the node-level count above is sound.
        for (i, &a) in cands.iter().enumerate() {
            let Some(w) = self.witness(live, a) else {
                continue;
            };
            // shrink the agreeing-pair set by the new action
            let new_live: Vec<PairState> = live
                .iter()
                .filter_map(|p| {
                    let d = self.values[p.f][a] - self.values[p.f2][a];
                    let sum = p.sum + d * d;
                    if sum.sqrt() <= self.eps {
                        Some(PairState {
                            f: p.f,
                            f2: p.f2,
                            sum,
                        })
                    } else {
                        None
                    }
                })
                .collect();
            let rest: Vec<usize> = cands
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &z)| z)
                .collect();
            chosen.push((a, w));
            self.go(chosen, &new_live, &rest);
            chosen.pop();
        }
    }
}

/// Longest action sequence in which every element is epsilon-independent
/// of its predecessors, with stored per-step witness pairs.
pub fn eluder_dim(
    f_values: &[Vec<f64>],
    epsilon: f64,
) -> Result<(usize, Option<DimensionCertificate>)> {
    if epsilon <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if f_values.is_empty() || f_values[0].is_empty() {
        return Err(Error::invalid("function table must be nonempty"));
    }
    let acts = f_values[0].len();
    if f_values.iter().any(|r| r.len() != acts) {
        return Err(Error::invalid("ragged function table"));
    }
    let mut pairs = Vec::new();
    for f in 0..f_values.len() {
        for f2 in (f + 1)..f_values.len() {
            pairs.push(PairState { f, f2, sum: 0.0 });
        }
    }
    let mut search = Search {
        values: f_values,
        eps: epsilon,
        best: Vec::new(),
    };
    let cands: Vec<usize> = (0..acts).collect();
    let mut chosen = Vec::new();
    search.go(&mut chosen, &pairs, &cands);
    if search.best.is_empty() {
        return Ok((0, None));
    }
    let sequence: Vec<usize> = search.best.iter().map(|&(a, _)| a).collect();
    let witnesses: Vec<(usize, usize)> = search.best.iter().map(|&(_, w)| w).collect();
    let value = sequence.len();
    Ok((
        value,
        Some(DimensionCertificate::Eluder {
            sequence,
            witnesses,
            epsilon,
            value,
        }),
    ))
}

/// Default gap grid for the monotone eluder dimension: no pair of values
/// in [-1,1] separates by more than 2, so the grid stops there.
pub fn default_eluder_grid(epsilon: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut x = epsilon;
    while x < 2.0 {
        grid.push(x);
        x *= 1.2;
    }
    if grid.is_empty() {
        grid.push(epsilon);
    }
    grid
}

/// Grid lower bound on max_{eps' >= eps} eluder_dim(eps'); ties prefer
/// the larger gap.
pub fn monotone_eluder_dim(
    f_values: &[Vec<f64>],
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
        let (d, cert) = eluder_dim(f_values, g)?;
        if d >= best {
            best = d;
            best_eps = g;
            best_cert = cert;
        }
    }
    Ok((best, best_eps, best_cert))
}
