//! The learners: least squares over the large-evaluation set, its
//! optimistic confidence-set variant, the regression-oracle forms, the
//! closed-form K-armed rule, the structured-bandit reductions, and the
//! estimation wrapper that turns any of them into a PAC learner.
//!
//! Tie-breaking is lowest index everywhere. The pure `*_select` functions
//! are the contractual definitions; the stateful learners maintain
//! incremental residual sums and must emit exactly the same queries (the
//! unit tests assert this equality on shared histories).

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::RegressionOracle;
use crate::protocol::{
    rng_for, run_protocol, sample_reward, AlternativeId, HistoryEntry, Instance, InstanceRef,
    Learner, NoiseMode, Transcript, STREAM_RESAMPLE,
};

/// The set Z_alpha = {z : rho(z|z) >= alpha}, precomputed once per
/// (instance, alpha).
#[derive(Debug, Clone)]
pub struct LargeEvalSet {
    pub members: Vec<AlternativeId>,
    pub alpha: f64,
}

impl LargeEvalSet {
    /// Errors when no alternative has self-evaluation >= alpha; an empty
    /// constraint set means the experiment is misconfigured.
    pub fn new(instance: &Instance, alpha: f64) -> Result<Self> {
        let members: Vec<AlternativeId> = (0..instance.len())
            .map(AlternativeId)
            .filter(|&z| instance.self_eval(z) >= alpha)
            .collect();
        if members.is_empty() {
            return Err(Error::config(format!(
                "no alternative has self-evaluation >= {alpha}"
            )));
        }
        Ok(LargeEvalSet { members, alpha })
    }
}

/// Confidence set produced by the optimistic rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfidenceSet {
    pub members: Vec<AlternativeId>,
    pub radius: f64,
    /// The unconstrained least-squares minimizer.
    pub center: AlternativeId,
}

fn residual_sum(instance: &Instance, candidate: AlternativeId, history: &[HistoryEntry]) -> f64 {
    let mut sum = 0.0;
    for h in history {
        let d = instance.eval_unchecked(h.query.0, candidate.0) - h.reward;
        sum += d * d;
    }
    sum
}

fn argmin_by_sum(members: &[AlternativeId], sums: &[f64]) -> AlternativeId {
    let mut best = 0usize;
    for i in 1..members.len() {
        if sums[i] < sums[best] {
            best = i;
        }
    }
    members[best]
}

/// Least-squares query rule: the member of Z_alpha minimizing the sum of
/// squared residuals against the observed rewards; lowest index on ties,
/// lowest-index member on an empty history.
pub fn ls_select(
    history: &[HistoryEntry],
    zalpha: &LargeEvalSet,
    instance: &Instance,
) -> AlternativeId {
    let sums: Vec<f64> = zalpha
        .members
        .iter()
        .map(|&m| residual_sum(instance, m, history))
        .collect();
    argmin_by_sum(&zalpha.members, &sums)
}

/// Optimistic rule: the unconstrained least-squares minimizer becomes the
/// center; the confidence set keeps every alternative whose rho rows stay
/// within `radius` (summed squared difference) of the center's over the
/// queried points; the query maximizes self-evaluation over the set.
pub fn optimistic_select(
    history: &[HistoryEntry],
    instance: &Instance,
    radius: f64,
) -> (AlternativeId, ConfidenceSet) {
    assert!(radius >= 0.0, "confidence radius must be nonnegative");
    let n = instance.len();
    let mut center = AlternativeId(0);
    let mut best = f64::INFINITY;
    let mut sums = vec![0.0; n];
    for z in 0..n {
        let s = residual_sum(instance, AlternativeId(z), history);
        sums[z] = s;
        if s < best {
            best = s;
            center = AlternativeId(z);
        }
    }
    let mut members = Vec::new();
    let mut query = None;
    let mut query_val = f64::NEG_INFINITY;
    for z in 0..n {
        let mut dev = 0.0;
        for h in history {
            let d = instance.eval_unchecked(h.query.0, z)
                - instance.eval_unchecked(h.query.0, center.0);
            dev += d * d;
        }
        if dev <= radius {
            members.push(AlternativeId(z));
            let sv = instance.self_eval(AlternativeId(z));
            if sv > query_val {
                query_val = sv;
                query = Some(AlternativeId(z));
            }
        }
    }
    let set = ConfidenceSet {
        members,
        radius,
        center,
    };
    (query.expect("confidence set contains the center"), set)
}

/// Oracle-smoothed least squares: same rule as [`ls_select`] but the
/// residuals target the oracle's predictions instead of the raw rewards.
pub fn oracle_ls_select(
    history: &[HistoryEntry],
    predictions: &[f64],
    zalpha: &LargeEvalSet,
    instance: &Instance,
) -> Result<AlternativeId> {
    if history.len() != predictions.len() {
        return Err(Error::invalid(format!(
            "history has {} steps but {} predictions were supplied",
            history.len(),
            predictions.len()
        )));
    }
    let sums: Vec<f64> = zalpha
        .members
        .iter()
        .map(|&m| {
            let mut sum = 0.0;
            for (h, &p) in history.iter().zip(predictions) {
                let d = instance.eval_unchecked(h.query.0, m.0) - p;
                sum += d * d;
            }
            sum
        })
        .collect();
    Ok(argmin_by_sum(&zalpha.members, &sums))
}

/// Optimistic form of the oracle rule: the set keeps alternatives whose
/// rho rows stay within `radius` of the predictions themselves, and the
/// query maximizes self-evaluation over it. The minimizer is added when
/// the radius would otherwise leave the set empty.
pub fn optimistic_oracle_select(
    history: &[HistoryEntry],
    predictions: &[f64],
    instance: &Instance,
    radius: f64,
) -> Result<(AlternativeId, ConfidenceSet)> {
    if history.len() != predictions.len() {
        return Err(Error::invalid(format!(
            "history has {} steps but {} predictions were supplied",
            history.len(),
            predictions.len()
        )));
    }
    let n = instance.len();
    let mut center = AlternativeId(0);
    let mut best = f64::INFINITY;
    let mut devs = vec![0.0; n];
    for z in 0..n {
        let mut dev = 0.0;
        for (h, &p) in history.iter().zip(predictions) {
            let d = instance.eval_unchecked(h.query.0, z) - p;
            dev += d * d;
        }
        devs[z] = dev;
        if dev < best {
            best = dev;
            center = AlternativeId(z);
        }
    }
    let mut members: Vec<AlternativeId> = (0..n)
        .map(AlternativeId)
        .filter(|z| devs[z.0] <= radius)
        .collect();
    if members.is_empty() {
        members.push(center);
    }
    let mut query = members[0];
    let mut query_val = instance.self_eval(query);
    for &z in &members[1..] {
        let sv = instance.self_eval(z);
        if sv > query_val {
            query_val = sv;
            query = z;
        }
    }
    Ok((
        query,
        ConfidenceSet {
            members,
            radius,
            center,
        },
    ))
}

/// Closed-form K-armed step. Unpulled arms count as having the maximal
/// possible average 1.0 (the optimistic completion of the constrained
/// least-squares solution); if the best effective average reaches alpha
/// the rule exploits it, otherwise it pays the cheapest constraint lift
/// argmin_a n_a (alpha - mean_a)^2. Ties go to the lowest arm index.
pub fn karmed_ls_step(arm_stats: &[(u64, f64)], alpha: f64) -> usize {
    debug_assert!(!arm_stats.is_empty());
    let effective = |a: usize| -> f64 {
        let (n, mean) = arm_stats[a];
        if n == 0 {
            1.0
        } else {
            mean
        }
    };
    let mut best = 0usize;
    for a in 1..arm_stats.len() {
        if effective(a) > effective(best) {
            best = a;
        }
    }
    if effective(best) >= alpha {
        return best;
    }
    let cost = |a: usize| -> f64 {
        let (n, mean) = arm_stats[a];
        n as f64 * (alpha - mean) * (alpha - mean)
    };
    let mut best = 0usize;
    for a in 1..arm_stats.len() {
        if cost(a) < cost(best) {
            best = a;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Stateful learners
// ---------------------------------------------------------------------------

/// Least squares with an optimality level (incremental residual sums).
pub struct LsLearner {
    instance: InstanceRef,
    zalpha: LargeEvalSet,
    sums: Vec<f64>,
    last_query: Option<AlternativeId>,
}

impl LsLearner {
    pub fn new(instance: InstanceRef, alpha: f64) -> Result<Self> {
        let zalpha = LargeEvalSet::new(&instance, alpha)?;
        let sums = vec![0.0; zalpha.members.len()];
        Ok(LsLearner {
            instance,
            zalpha,
            sums,
            last_query: None,
        })
    }

    pub fn zalpha(&self) -> &LargeEvalSet {
        &self.zalpha
    }
}

impl Learner for LsLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        let q = argmin_by_sum(&self.zalpha.members, &self.sums);
        self.last_query = Some(q);
        q
    }

    fn observe(&mut self, reward: f64) {
        let q = self.last_query.expect("observe follows select");
        for (i, &m) in self.zalpha.members.iter().enumerate() {
            let d = self.instance.eval_unchecked(q.0, m.0) - reward;
            self.sums[i] += d * d;
        }
    }
}

/// Optimistic least squares with a fixed confidence radius.
pub struct OptimisticLearner {
    instance: InstanceRef,
    radius: f64,
    history: Vec<HistoryEntry>,
    pending: Option<AlternativeId>,
    /// Confidence set of the most recent selection, for inspection.
    pub last_set: Option<ConfidenceSet>,
}

impl OptimisticLearner {
    pub fn new(instance: InstanceRef, radius: f64) -> Self {
        assert!(radius >= 0.0, "confidence radius must be nonnegative");
        OptimisticLearner {
            instance,
            radius,
            history: Vec::new(),
            pending: None,
            last_set: None,
        }
    }
}

impl Learner for OptimisticLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        let (q, set) = optimistic_select(&self.history, &self.instance, self.radius);
        self.pending = Some(q);
        self.last_set = Some(set);
        q
    }

    fn observe(&mut self, reward: f64) {
        let q = self.pending.take().expect("observe follows select");
        self.history.push(HistoryEntry { query: q, reward });
    }
}

/// Algorithm 4 shape: an online regression oracle smooths the rewards and
/// the least-squares rule targets the smoothed values.
pub struct OracleLsLearner {
    instance: InstanceRef,
    zalpha: LargeEvalSet,
    oracle: RegressionOracle,
    sums: Vec<f64>,
    current: AlternativeId,
    pending_prediction: Option<f64>,
    pub predictions: Vec<f64>,
}

impl OracleLsLearner {
    pub fn new(instance: InstanceRef, alpha: f64, oracle: RegressionOracle) -> Result<Self> {
        let zalpha = LargeEvalSet::new(&instance, alpha)?;
        let sums = vec![0.0; zalpha.members.len()];
        // The first query is the lowest-index member of Z_alpha.
        let current = zalpha.members[0];
        Ok(OracleLsLearner {
            instance,
            zalpha,
            oracle,
            sums,
            current,
            pending_prediction: None,
            predictions: Vec::new(),
        })
    }
}

impl Learner for OracleLsLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        // Predict before the response arrives.
        self.pending_prediction = Some(self.oracle.predict(self.current, &self.instance));
        self.current
    }

    fn observe(&mut self, reward: f64) {
        let q = self.current;
        let prediction = self
            .pending_prediction
            .take()
            .expect("observe follows select");
        self.oracle.update(q, reward, &self.instance);
        self.predictions.push(prediction);
        for (i, &m) in self.zalpha.members.iter().enumerate() {
            let d = self.instance.eval_unchecked(q.0, m.0) - prediction;
            self.sums[i] += d * d;
        }
        self.current = argmin_by_sum(&self.zalpha.members, &self.sums);
    }
}

/// Optimistic oracle learner: the confidence set keeps alternatives whose
/// rho rows stay within the radius of the oracle predictions.
pub struct OptimisticOracleLearner {
    instance: InstanceRef,
    radius: f64,
    oracle: RegressionOracle,
    devs: Vec<f64>,
    current: AlternativeId,
    pending_prediction: Option<f64>,
    pub predictions: Vec<f64>,
}

impl OptimisticOracleLearner {
    pub fn new(instance: InstanceRef, radius: f64, oracle: RegressionOracle) -> Self {
        let devs = vec![0.0; instance.len()];
        // Empty prediction history: every alternative is in the set, so the
        // first query is the global self-evaluation argmax.
        let mut current = AlternativeId(0);
        let mut best = instance.self_eval(current);
        for z in 1..instance.len() {
            let sv = instance.self_eval(AlternativeId(z));
            if sv > best {
                best = sv;
                current = AlternativeId(z);
            }
        }
        OptimisticOracleLearner {
            instance,
            radius,
            oracle,
            devs,
            current,
            pending_prediction: None,
            predictions: Vec::new(),
        }
    }
}

impl Learner for OptimisticOracleLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        self.pending_prediction = Some(self.oracle.predict(self.current, &self.instance));
        self.current
    }

    fn observe(&mut self, reward: f64) {
        let q = self.current;
        let prediction = self
            .pending_prediction
            .take()
            .expect("observe follows select");
        self.oracle.update(q, reward, &self.instance);
        self.predictions.push(prediction);
        let mut center = AlternativeId(0);
        let mut best_dev = f64::INFINITY;
        for z in 0..self.instance.len() {
            let d = self.instance.eval_unchecked(q.0, z) - prediction;
            self.devs[z] += d * d;
            if self.devs[z] < best_dev {
                best_dev = self.devs[z];
                center = AlternativeId(z);
            }
        }
        let mut query = None;
        let mut query_val = f64::NEG_INFINITY;
        for z in 0..self.instance.len() {
            if self.devs[z] <= self.radius {
                let sv = self.instance.self_eval(AlternativeId(z));
                if sv > query_val {
                    query_val = sv;
                    query = Some(AlternativeId(z));
                }
            }
        }
        self.current = query.unwrap_or(center);
    }
}

/// Closed-form K-armed learner over a product instance. It keeps per-arm
/// pull counts and averages and never consults the function grid; the
/// emitted alternative is the lowest-index pair carrying the chosen arm.
pub struct KarmedLearner {
    alpha: f64,
    counts: Vec<u64>,
    sums: Vec<f64>,
    arm_to_id: Vec<AlternativeId>,
    last_arm: Option<usize>,
}

impl KarmedLearner {
    pub fn new(instance: InstanceRef, alpha: f64) -> Result<Self> {
        let values = instance
            .product_values()
            .ok_or_else(|| Error::config("K-armed learner requires a product instance"))?;
        let acts = values[0].len();
        let mut arm_to_id = vec![None; acts];
        for id in 0..instance.len() {
            let (_, a) = instance.pair_of(AlternativeId(id)).expect("product pair");
            if arm_to_id[a].is_none() {
                arm_to_id[a] = Some(AlternativeId(id));
            }
        }
        Ok(KarmedLearner {
            alpha,
            counts: vec![0; acts],
            sums: vec![0.0; acts],
            arm_to_id: arm_to_id
                .into_iter()
                .map(|o| o.expect("every arm appears"))
                .collect(),
            last_arm: None,
        })
    }
}

impl Learner for KarmedLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        let stats: Vec<(u64, f64)> = self
            .counts
            .iter()
            .zip(&self.sums)
            .map(|(&n, &s)| (n, if n == 0 { 0.0 } else { s / n as f64 }))
            .collect();
        let arm = karmed_ls_step(&stats, self.alpha);
        self.last_arm = Some(arm);
        self.arm_to_id[arm]
    }

    fn observe(&mut self, reward: f64) {
        let arm = self.last_arm.expect("observe follows select");
        self.counts[arm] += 1;
        self.sums[arm] += reward;
    }

    fn finalize(&self) -> Option<AlternativeId> {
        self.last_arm.map(|a| self.arm_to_id[a])
    }
}

/// Structured-bandit reduction of the least-squares rule: restrict the
/// regression to F_alpha = {f : max_a f(a) >= alpha}, then play the
/// argmax action of the fitted function.
pub struct StructuredLsLearner {
    instance: InstanceRef,
    /// Indices into the function table with max_a f(a) >= alpha.
    falpha: Vec<usize>,
    sums: Vec<f64>,
    /// Precomputed argmax action per function (lowest index on ties).
    best_action: Vec<usize>,
    last_action: Option<usize>,
}

impl StructuredLsLearner {
    pub fn new(instance: InstanceRef, alpha: f64) -> Result<Self> {
        let values = instance
            .product_values()
            .ok_or_else(|| Error::config("structured learner requires a product instance"))?;
        let best_action: Vec<usize> = values
            .iter()
            .map(|row| {
                let mut best = 0usize;
                for a in 1..row.len() {
                    if row[a] > row[best] {
                        best = a;
                    }
                }
                best
            })
            .collect();
        let falpha: Vec<usize> = (0..values.len())
            .filter(|&f| values[f][best_action[f]] >= alpha)
            .collect();
        if falpha.is_empty() {
            return Err(Error::config(format!(
                "no function reaches max_a f(a) >= {alpha}"
            )));
        }
        let sums = vec![0.0; falpha.len()];
        Ok(StructuredLsLearner {
            instance,
            falpha,
            sums,
            best_action,
            last_action: None,
        })
    }
}

impl Learner for StructuredLsLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        let mut best = 0usize;
        for i in 1..self.falpha.len() {
            if self.sums[i] < self.sums[best] {
                best = i;
            }
        }
        let f = self.falpha[best];
        let a = self.best_action[f];
        self.last_action = Some(a);
        self.instance.id_of_pair(f, a).expect("pair exists")
    }

    fn observe(&mut self, reward: f64) {
        let a = self.last_action.expect("observe follows select");
        let values = self.instance.product_values().expect("product instance");
        for (i, &f) in self.falpha.iter().enumerate() {
            let d = values[f][a] - reward;
            self.sums[i] += d * d;
        }
    }
}

/// Structured-bandit reduction of the optimistic rule: fit over all of F,
/// keep the functions within the radius of the fit on queried actions,
/// and play the globally optimistic (function, action) pair.
pub struct StructuredOptimisticLearner {
    instance: InstanceRef,
    radius: f64,
    /// Per-function squared residual sums against the rewards.
    fit_sums: Vec<f64>,
    /// Queried actions so far.
    actions: Vec<usize>,
    last_action: Option<usize>,
}

impl StructuredOptimisticLearner {
    pub fn new(instance: InstanceRef, radius: f64) -> Result<Self> {
        if radius < 0.0 {
            return Err(Error::invalid("confidence radius must be nonnegative"));
        }
        let values = instance
            .product_values()
            .ok_or_else(|| Error::config("structured learner requires a product instance"))?;
        let funcs = values.len();
        Ok(StructuredOptimisticLearner {
            instance,
            radius,
            fit_sums: vec![0.0; funcs],
            actions: Vec::new(),
            last_action: None,
        })
    }
}

impl Learner for StructuredOptimisticLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        let values = self.instance.product_values().expect("product instance");
        let mut fit = 0usize;
        for f in 1..values.len() {
            if self.fit_sums[f] < self.fit_sums[fit] {
                fit = f;
            }
        }
        let mut best: Option<(usize, usize)> = None;
        let mut best_val = f64::NEG_INFINITY;
        for (f, row) in values.iter().enumerate() {
            let mut dev = 0.0;
            for &a in &self.actions {
                let d = row[a] - values[fit][a];
                dev += d * d;
            }
            if dev <= self.radius {
                for (a, &v) in row.iter().enumerate() {
                    if v > best_val {
                        best_val = v;
                        best = Some((f, a));
                    }
                }
            }
        }
        let (f, a) = best.expect("confidence set contains the fit");
        self.last_action = Some(a);
        self.instance.id_of_pair(f, a).expect("pair exists")
    }

    fn observe(&mut self, reward: f64) {
        let a = self.last_action.expect("observe follows select");
        let values = self.instance.product_values().expect("product instance");
        for (f, row) in values.iter().enumerate() {
            let d = row[a] - reward;
            self.fit_sums[f] += d * d;
        }
        self.actions.push(a);
    }
}

/// Scans a fixed list of alternatives in order, wrapping around.
pub struct ScanLearner {
    ids: Vec<AlternativeId>,
    next: usize,
}

impl ScanLearner {
    pub fn new(ids: Vec<AlternativeId>) -> Self {
        ScanLearner { ids, next: 0 }
    }
}

impl Learner for ScanLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        let id = self.ids[self.next % self.ids.len()];
        self.next += 1;
        id
    }

    fn observe(&mut self, _reward: f64) {}
}

/// Queries uniformly at random among `count` alternatives.
pub struct UniformLearner {
    count: usize,
    rng: ChaCha8Rng,
}

impl UniformLearner {
    pub fn new(count: usize, rng: ChaCha8Rng) -> Self {
        UniformLearner { count, rng }
    }
}

impl Learner for UniformLearner {
    fn select(&mut self, _history: &[HistoryEntry]) -> AlternativeId {
        AlternativeId(self.rng.random_range(0..self.count))
    }

    fn observe(&mut self, _reward: f64) {}
}

// ---------------------------------------------------------------------------
// PAC wrapper
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PacConfig {
    pub t_steps: usize,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl PacConfig {
    fn validate(&self) -> Result<()> {
        if self.t_steps == 0 || self.n1 == 0 || self.n2 == 0 {
            return Err(Error::invalid("PAC parameters require T, n1, n2 >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PacOutcome {
    pub chosen: AlternativeId,
    pub base_transcript: Transcript,
    /// (step index sampled, average re-query response); empty in the
    /// deterministic shortcut.
    pub resamples: Vec<(usize, f64)>,
}

/// Runs the base learner, then estimates the best of n1 resampled queries
/// by re-querying each n2 times. In the deterministic setting the base
/// run's largest observed reward wins directly, with no resampling.
pub fn pac_estimate(
    instance: &InstanceRef,
    base: &mut dyn Learner,
    cfg: &PacConfig,
    seed: u64,
) -> Result<PacOutcome> {
    cfg.validate()?;
    let transcript = run_protocol(instance, base, cfg.t_steps, cfg.alpha, seed)?;
    if instance.noise_mode() == NoiseMode::Deterministic {
        let mut best_t = 0usize;
        for (i, s) in transcript.steps.iter().enumerate() {
            if s.reward.value > transcript.steps[best_t].reward.value {
                best_t = i;
            }
        }
        let chosen = transcript.steps[best_t].query;
        return Ok(PacOutcome {
            chosen,
            base_transcript: transcript,
            resamples: Vec::new(),
        });
    }
    let mut rng = rng_for(seed, STREAM_RESAMPLE);
    let mut resamples = Vec::with_capacity(cfg.n1);
    let mut best: Option<(usize, f64)> = None;
    for _ in 0..cfg.n1 {
        // Uniform with replacement over {1..T}.
        let t = rng.random_range(0..cfg.t_steps);
        let query = transcript.steps[t].query;
        let mut acc = 0.0;
        for _ in 0..cfg.n2 {
            acc += sample_reward(instance, query, &mut rng)?.value;
        }
        let avg = acc / cfg.n2 as f64;
        resamples.push((t + 1, avg));
        let better = match best {
            None => true,
            Some((_, cur)) => avg > cur,
        };
        if better {
            best = Some((t, avg));
        }
    }
    let (t, _) = best.expect("n1 >= 1");
    Ok(PacOutcome {
        chosen: transcript.steps[t].query,
        base_transcript: transcript,
        resamples,
    })
}
