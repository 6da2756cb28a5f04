//! The hard indicator class and its convex cover, plus the uniform-target
//! lower-bound experiment.
//!
//! F_hard holds N indicator-style functions over special points of the
//! open upper arc: f_i is +eps on x_i, -eps on the other special points,
//! zero elsewhere. The cover family F_tilde = {f_i^{+v}, f_i^{-v}} with
//! v = (0,1) agrees with F_hard on the special points, is zero on the
//! right semicircle off the special points, and is linear <+-v, a>
//! outside it; the convex identity f_i = (f_i^v + f_i^{-v})/2 is checked
//! exactly at build time.

use rand::RngExt;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::learners::{LsLearner, ScanLearner, UniformLearner};
use crate::protocol::{
    regret, rng_for, run_with_means, Instance, InstanceRef, Learner, Metadata, NoiseMode,
    STREAM_LEARNER,
};

use super::net::{circle_net, dot, in_u0, in_u1, snap_ip};

#[derive(Debug, Clone)]
pub struct HardContext {
    /// Action indices of the special points x_1..x_N, ascending.
    pub special_acts: Vec<usize>,
    pub eps: f64,
    pub net_len: usize,
    /// Action index of v = (0, 1).
    pub v_act: usize,
}

#[derive(Debug, Clone)]
pub struct HardPair {
    /// Product instance over F_hard (target: f_1).
    pub hard: Instance,
    /// Product instance over F_tilde (target: f_1^v).
    pub tilde: Instance,
    pub context: HardContext,
    pub hard_values: Vec<Vec<f64>>,
    pub tilde_values: Vec<Vec<f64>>,
}

fn hard_value(ctx: &HardContext, target: usize, act: usize) -> f64 {
    if act == ctx.special_acts[target] {
        ctx.eps
    } else if ctx.special_acts.contains(&act) {
        -ctx.eps
    } else {
        0.0
    }
}

/// Builds the pair of instances. `resolution` must be divisible by 4 so
/// that (0,1) and (0,-1) are net points; special points are sampled from
/// the open upper arc excluding (0,1).
pub fn make_hard_indicator(
    n_special: usize,
    eps: f64,
    resolution: usize,
    seed: u64,
) -> Result<HardPair> {
    if n_special == 0 {
        return Err(Error::invalid("n_special must be at least 1"));
    }
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if resolution % 4 != 0 || resolution < 8 {
        return Err(Error::invalid("resolution must be >= 8 and divisible by 4"));
    }
    let net = circle_net(resolution);
    let v_act = net
        .iter()
        .position(|p| p[0] == 0.0 && p[1] == 1.0)
        .expect("(0,1) on the net");
    let candidates: Vec<usize> = (0..net.len())
        .filter(|&a| in_u1(&net[a]) && a != v_act)
        .collect();
    if candidates.len() < n_special {
        return Err(Error::SizeCap {
            what: "special points on the upper arc".into(),
            requested: n_special,
            cap: candidates.len(),
        });
    }
    let mut rng = rng_for(seed, 13);
    let mut pool = candidates;
    let mut special_acts = Vec::with_capacity(n_special);
    for _ in 0..n_special {
        let i = rng.random_range(0..pool.len());
        special_acts.push(pool.swap_remove(i));
    }
    special_acts.sort_unstable();
    let ctx = HardContext {
        special_acts: special_acts.clone(),
        eps,
        net_len: net.len(),
        v_act,
    };

    let hard_values: Vec<Vec<f64>> = (0..n_special)
        .map(|i| (0..net.len()).map(|a| hard_value(&ctx, i, a)).collect())
        .collect();

    // F_tilde, interleaved per index: f_1^v, f_1^{-v}, f_2^v, ...
    let dirs = [vec![0.0, 1.0], vec![0.0, -1.0]];
    let mut tilde_values: Vec<Vec<f64>> = Vec::with_capacity(2 * n_special);
    for i in 0..n_special {
        for dir in &dirs {
            let row: Vec<f64> = net
                .iter()
                .enumerate()
                .map(|(a, p)| {
                    if a == special_acts[i] {
                        eps
                    } else if special_acts.contains(&a) {
                        -eps
                    } else if in_u0(p) {
                        0.0
                    } else {
                        snap_ip(dot(dir, p))
                    }
                })
                .collect();
            tilde_values.push(row);
        }
    }

    // Convex identity: f_i = (f_i^v + f_i^{-v}) / 2 on every action.
    for i in 0..n_special {
        for a in 0..net.len() {
            let mix = 0.5 * (tilde_values[2 * i][a] + tilde_values[2 * i + 1][a]);
            if (mix - hard_values[i][a]).abs() > 1e-12 {
                return Err(Error::construction(format!(
                    "convex identity violated at function {i}, action {a}"
                )));
            }
        }
    }

    let hard_meta = Metadata::new(
        "hard_indicator",
        json!({"n_special": n_special, "eps": eps, "resolution": resolution, "seed": seed}),
    );
    let mut tilde_meta = Metadata::new(
        "hard_indicator_tilde",
        json!({"n_special": n_special, "eps": eps, "resolution": resolution, "seed": seed}),
    );
    tilde_meta.notes.push(
        "special points lie on the open upper arc while the zero region is the right \
         semicircle, following the displayed construction verbatim"
            .to_string(),
    );
    let hard = Instance::from_product(hard_values.clone(), 0, NoiseMode::TwoPoint, hard_meta)?;
    let tilde = Instance::from_product(tilde_values.clone(), 0, NoiseMode::TwoPoint, tilde_meta)?;
    Ok(HardPair {
        hard,
        tilde,
        context: ctx,
        hard_values,
        tilde_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HardLearnerKind {
    /// Least squares over F_tilde with alpha = eps.
    LsOnTilde,
    /// Scans the special points in order.
    ScanBaseline,
    /// Queries uniformly at random over the tilde pairs.
    UniformRandom,
}

#[derive(Debug, Clone, Serialize)]
pub struct HardLowerBoundReport {
    pub learner: HardLearnerKind,
    pub n_special: usize,
    pub eps: f64,
    pub t_steps: usize,
    pub trials: usize,
    pub mean_regret: f64,
    pub mean_t_opt: f64,
    /// Empirical P(T_opt >= min(N/2, T)).
    pub p_t_opt_at_threshold: f64,
    pub threshold: f64,
    /// (1 - 2/N)^{min(N/2, T)}.
    pub prob_comparator: f64,
    /// (min(N/2, T) - 1) * eps / (2e).
    pub regret_comparator: f64,
}

/// Runs the uniform-target experiment: per trial the ground truth is a
/// uniformly drawn member of F_hard; the learner sees only the tilde
/// instance, rewards are two-point around the hard function's values.
pub fn run_hard_lower_bound(
    pair: &HardPair,
    learner_kind: HardLearnerKind,
    t_steps: usize,
    trials: usize,
    seed: u64,
) -> Result<HardLowerBoundReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if t_steps == 0 {
        return Err(Error::invalid("T must be at least 1"));
    }
    let ctx = &pair.context;
    let n = ctx.special_acts.len();
    let eps = ctx.eps;
    let tilde: InstanceRef = std::sync::Arc::new(pair.tilde.clone());

    // Lowest-index pair per special action, for the scan baseline.
    let scan_ids: Vec<_> = ctx
        .special_acts
        .iter()
        .map(|&act| {
            (0..tilde.len())
                .map(crate::protocol::AlternativeId)
                .find(|&id| tilde.pair_of(id).unwrap().1 == act)
                .expect("every action appears in the product")
        })
        .collect();

    let mut meta_rng = rng_for(seed, 17);
    let mut total_regret = 0.0;
    let mut total_t_opt = 0.0;
    let threshold = (n as f64 / 2.0).min(t_steps as f64);
    let mut hits_at_threshold = 0usize;
    for _ in 0..trials {
        let target = meta_rng.random_range(0..n);
        let run_seed = meta_rng.random::<u64>();
        let means: Vec<f64> = (0..tilde.len())
            .map(|id| {
                let (_, act) = tilde.pair_of(crate::protocol::AlternativeId(id)).unwrap();
                hard_value(ctx, target, act)
            })
            .collect();
        let mut learner: Box<dyn Learner> = match learner_kind {
            HardLearnerKind::LsOnTilde => {
                Box::new(LsLearner::new(std::sync::Arc::clone(&tilde), eps)?)
            }
            HardLearnerKind::ScanBaseline => Box::new(ScanLearner::new(scan_ids.clone())),
            HardLearnerKind::UniformRandom => Box::new(UniformLearner::new(
                tilde.len(),
                rng_for(run_seed, STREAM_LEARNER),
            )),
        };
        let transcript = run_with_means(&tilde, &means, learner.as_mut(), t_steps, eps, run_seed)?;
        total_regret += regret(&transcript);
        let t_opt = transcript
            .steps
            .iter()
            .find(|s| tilde.pair_of(s.query).unwrap().1 == ctx.special_acts[target])
            .map(|s| s.t)
            .unwrap_or(t_steps + 1);
        total_t_opt += t_opt as f64;
        if t_opt as f64 >= threshold {
            hits_at_threshold += 1;
        }
    }
    Ok(HardLowerBoundReport {
        learner: learner_kind,
        n_special: n,
        eps,
        t_steps,
        trials,
        mean_regret: total_regret / trials as f64,
        mean_t_opt: total_t_opt / trials as f64,
        p_t_opt_at_threshold: hits_at_threshold as f64 / trials as f64,
        threshold,
        prob_comparator: (1.0 - 2.0 / n as f64).powf(threshold),
        regret_comparator: (threshold - 1.0) * eps / (2.0 * std::f64::consts::E),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TildeEasyReport {
    pub trials: usize,
    pub t_steps: usize,
    pub mean_regret_alpha_one: f64,
    /// The lower-bound comparator of the uniform F_hard experiment.
    pub regret_comparator: f64,
    /// True when the in-class runs beat the uniform-target rate.
    pub beats_lower_bound_rate: bool,
}

/// In-class contrast runs: the ground truth is a uniformly drawn member
/// of F_tilde itself, and least squares runs at alpha = 1. The mean
/// regret is compared against the uniform-F_hard lower-bound rate.
pub fn run_tilde_easy(
    pair: &HardPair,
    t_steps: usize,
    trials: usize,
    seed: u64,
) -> Result<TildeEasyReport> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let ctx = &pair.context;
    let n = ctx.special_acts.len();
    let tilde: InstanceRef = std::sync::Arc::new(pair.tilde.clone());
    let mut meta_rng = rng_for(seed, 19);
    let mut total = 0.0;
    for _ in 0..trials {
        let f_star = meta_rng.random_range(0..pair.tilde_values.len());
        let run_seed = meta_rng.random::<u64>();
        let means: Vec<f64> = (0..tilde.len())
            .map(|id| {
                let (_, act) = tilde.pair_of(crate::protocol::AlternativeId(id)).unwrap();
                pair.tilde_values[f_star][act]
            })
            .collect();
        let mut learner = LsLearner::new(std::sync::Arc::clone(&tilde), 1.0)?;
        let transcript = run_with_means(&tilde, &means, &mut learner, t_steps, 1.0, run_seed)?;
        total += regret(&transcript);
    }
    let threshold = (n as f64 / 2.0).min(t_steps as f64);
    let comparator = (threshold - 1.0) * ctx.eps / (2.0 * std::f64::consts::E);
    let mean = total / trials as f64;
    Ok(TildeEasyReport {
        trials,
        t_steps,
        mean_regret_alpha_one: mean,
        regret_comparator: comparator,
        beats_lower_bound_rate: mean < comparator,
    })
}
