//! The interaction protocol: alternatives, evaluation tables, reward
//! sampling, and the learner/environment run loop.
//!
//! An [`Instance`] is a finite set of alternatives `Z`, an evaluation
//! function `rho(z|z') in [-1,1]` addressable by index pairs, a target
//! alternative, and a noise mode. A learner repeatedly selects an
//! alternative and observes a reward with mean `rho(query|target)`;
//! the run loop records everything in a [`Transcript`].

use std::fmt;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an alternative inside an instance's ordered set.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct AlternativeId(pub usize);

impl fmt::Display for AlternativeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How rewards are drawn around the mean `rho(query|target)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Reward equals the mean exactly.
    Deterministic,
    /// Reward in {-1,+1} with P(+1) = (1+mean)/2.
    TwoPoint,
    /// Sample-oracle rewards for hypothesis instances: draw x ~ D fresh and
    /// return h(x)h*(x) in {-1,+1}. Same law as two-point, drawn literally.
    SqSample,
}

/// Opaque per-alternative payload attached by generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AltPayload {
    None,
    /// A (function, action) pair of a product instance.
    Pair {
        func: usize,
        act: usize,
    },
    /// A point of a geometric net.
    Point(Vec<f64>),
    /// A hypothesis index.
    Hypothesis(usize),
}

/// Free-form provenance carried by instances and copied into transcripts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Metadata {
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(generator: impl Into<String>, params: serde_json::Value) -> Self {
        Metadata {
            generator: generator.into(),
            params,
            notes: Vec::new(),
        }
    }
}

/// Data needed to draw sample-oracle rewards for hypothesis instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqData {
    /// One row per hypothesis, entries in {-1,+1}.
    pub hypotheses: Vec<Vec<i8>>,
    /// Distribution over the domain, same length as each row.
    pub dist: Vec<f64>,
}

/// Backing storage for the evaluation function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSource {
    /// Row-major dense table: entry `left * n + right` is `rho(left|right)`.
    Dense { table: Vec<f64> },
    /// Product structure Z = F x A with rho((f,a)|(f',a')) = f'(a).
    /// `values[f][a]` is f(a); `pair_of[id]` maps an alternative index to
    /// its (f, a) pair.
    Product {
        values: Vec<Vec<f64>>,
        pair_of: Vec<(usize, usize)>,
    },
}

/// A finite interactive-estimation environment.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    alternatives: Vec<AltPayload>,
    eval: EvalSource,
    target: AlternativeId,
    alpha_star: f64,
    noise_mode: NoiseMode,
    #[serde(default)]
    sq: Option<SqData>,
    pub metadata: Metadata,
}

impl Instance {
    /// Builds a dense-table instance and validates every invariant:
    /// range of rho, optimality of the target, alpha_star consistency.
    pub fn from_dense(
        alternatives: Vec<AltPayload>,
        table: Vec<f64>,
        target: AlternativeId,
        noise_mode: NoiseMode,
        metadata: Metadata,
    ) -> Result<Self> {
        let n = alternatives.len();
        if n == 0 {
            return Err(Error::construction(
                "instance must have at least one alternative",
            ));
        }
        if table.len() != n * n {
            return Err(Error::construction(format!(
                "dense table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        if target.0 >= n {
            return Err(Error::construction("target index out of range"));
        }
        let inst = Instance {
            alternatives,
            eval: EvalSource::Dense { table },
            target,
            alpha_star: 0.0,
            noise_mode,
            sq: None,
            metadata,
        };
        inst.finish_validation()
    }

    /// Builds a product instance from a per-function value table.
    ///
    /// Alternatives are enumerated f-major; within each function the
    /// actions are ordered by descending value (stable). This makes the
    /// lowest-index pair of every function its argmax action, which is what
    /// keeps the structured-bandit learners and the generic least-squares
    /// rules in exact agreement under lowest-index tie-breaking.
    pub fn from_product(
        values: Vec<Vec<f64>>,
        target_func: usize,
        noise_mode: NoiseMode,
        metadata: Metadata,
    ) -> Result<Self> {
        let funcs = values.len();
        if funcs == 0 {
            return Err(Error::construction(
                "product instance needs at least one function",
            ));
        }
        let acts = values[0].len();
        if acts == 0 {
            return Err(Error::construction(
                "product instance needs at least one action",
            ));
        }
        if values.iter().any(|row| row.len() != acts) {
            return Err(Error::construction("ragged function value table"));
        }
        if target_func >= funcs {
            return Err(Error::construction("target function index out of range"));
        }
        let mut pair_of = Vec::with_capacity(funcs * acts);
        let mut alternatives = Vec::with_capacity(funcs * acts);
        let mut target = None;
        for (f, row) in values.iter().enumerate() {
            let mut order: Vec<usize> = (0..acts).collect();
            order.sort_by(|&a, &b| {
                row[b]
                    .partial_cmp(&row[a])
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            for (slot, &a) in order.iter().enumerate() {
                if f == target_func && slot == 0 {
                    target = Some(AlternativeId(pair_of.len()));
                }
                pair_of.push((f, a));
                alternatives.push(AltPayload::Pair { func: f, act: a });
            }
        }
        let inst = Instance {
            alternatives,
            eval: EvalSource::Product { values, pair_of },
            target: target.expect("target pair recorded"),
            alpha_star: 0.0,
            noise_mode,
            sq: None,
            metadata,
        };
        inst.finish_validation()
    }

    pub(crate) fn with_sq_data(mut self, sq: SqData) -> Self {
        self.sq = Some(sq);
        self
    }

    fn finish_validation(mut self) -> Result<Self> {
        // The protocol only requires bounded mean-correct rewards; the
        // concrete law is this library's choice, so flag it.
        let note = match self.noise_mode {
            NoiseMode::TwoPoint => {
                Some("reward law: two-point r in {-1,+1} with P(+1) = (1+mean)/2")
            }
            NoiseMode::SqSample => Some("reward law: sample oracle, r = h(x)h*(x) with x ~ D"),
            NoiseMode::Deterministic => None,
        };
        if let Some(note) = note {
            if !self.metadata.notes.iter().any(|n| n == note) {
                self.metadata.notes.push(note.to_string());
            }
        }
        let n = self.len();
        for left in 0..n {
            for right in 0..n {
                let v = self.eval_unchecked(left, right);
                if !(-1.0..=1.0).contains(&v) || !v.is_finite() {
                    return Err(Error::construction(format!(
                        "rho({left}|{right}) = {v} outside [-1, 1]"
                    )));
                }
            }
        }
        let t = self.target.0;
        let best = self.eval_unchecked(t, t);
        for z in 0..n {
            if self.eval_unchecked(z, t) > best {
                return Err(Error::construction(format!(
                    "target not optimal: rho({z}|target) = {} > rho(target|target) = {best}",
                    self.eval_unchecked(z, t)
                )));
            }
        }
        self.alpha_star = best;
        Ok(self)
    }

    /// Re-validates an instance loaded from JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Instance = serde_json::from_str(text)?;
        let declared = raw.alpha_star;
        let inst = raw.finish_validation()?;
        if inst.alpha_star != declared {
            return Err(Error::construction(format!(
                "declared alpha_star {declared} does not equal rho(target|target) = {}",
                inst.alpha_star
            )));
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }

    pub fn target(&self) -> AlternativeId {
        self.target
    }

    pub fn alpha_star(&self) -> f64 {
        self.alpha_star
    }

    pub fn noise_mode(&self) -> NoiseMode {
        self.noise_mode
    }

    pub fn payload(&self, id: AlternativeId) -> &AltPayload {
        &self.alternatives[id.0]
    }

    pub fn payloads(&self) -> &[AltPayload] {
        &self.alternatives
    }

    pub fn sq_data(&self) -> Option<&SqData> {
        self.sq.as_ref()
    }

    /// The (function, action) decomposition when this is a product instance.
    pub fn pair_of(&self, id: AlternativeId) -> Option<(usize, usize)> {
        match &self.eval {
            EvalSource::Product { pair_of, .. } => pair_of.get(id.0).copied(),
            EvalSource::Dense { .. } => None,
        }
    }

    /// The f(a) table of a product instance.
    pub fn product_values(&self) -> Option<&Vec<Vec<f64>>> {
        match &self.eval {
            EvalSource::Product { values, .. } => Some(values),
            EvalSource::Dense { .. } => None,
        }
    }

    /// Alternative id of a (function, action) pair of a product instance.
    pub fn id_of_pair(&self, func: usize, act: usize) -> Option<AlternativeId> {
        match &self.eval {
            EvalSource::Product { pair_of, .. } => pair_of
                .iter()
                .position(|&(f, a)| f == func && a == act)
                .map(AlternativeId),
            EvalSource::Dense { .. } => None,
        }
    }

    pub(crate) fn eval_unchecked(&self, left: usize, right: usize) -> f64 {
        match &self.eval {
            EvalSource::Dense { table } => table[left * self.alternatives.len() + right],
            EvalSource::Product { values, pair_of } => {
                let (_, act) = pair_of[left];
                let (func, _) = pair_of[right];
                values[func][act]
            }
        }
    }

    pub fn self_eval(&self, id: AlternativeId) -> f64 {
        self.eval_unchecked(id.0, id.0)
    }

    /// Mean reward of `query`, i.e. rho(query|target).
    pub fn mean_of(&self, query: AlternativeId) -> f64 {
        self.eval_unchecked(query.0, self.target.0)
    }
}

/// rho(left|right), with id validation.
pub fn evaluate(instance: &Instance, left: AlternativeId, right: AlternativeId) -> Result<f64> {
    let n = instance.len();
    if left.0 >= n || right.0 >= n {
        return Err(Error::invalid(format!(
            "alternative id out of range (left {}, right {}, |Z| = {n})",
            left.0, right.0
        )));
    }
    Ok(instance.eval_unchecked(left.0, right.0))
}

/// One observed reward together with the mean it was drawn around.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardSample {
    pub value: f64,
    pub mean: f64,
}

/// Deterministic sub-stream derivation: one 64-bit seed per run, with
/// fixed stream ids for rewards (0), learner randomness (1), and
/// resampling (2). splitmix64 over seed and stream keeps streams
/// independent without relying on generator-specific stream support.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut x = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    ChaCha8Rng::seed_from_u64(x)
}

pub const STREAM_REWARDS: u64 = 0;
pub const STREAM_LEARNER: u64 = 1;
pub const STREAM_RESAMPLE: u64 = 2;

/// Draws one reward for `query` under the instance's noise mode.
pub fn sample_reward(
    instance: &Instance,
    query: AlternativeId,
    rng: &mut ChaCha8Rng,
) -> Result<RewardSample> {
    if query.0 >= instance.len() {
        return Err(Error::invalid(format!(
            "query id {} out of range (|Z| = {})",
            query.0,
            instance.len()
        )));
    }
    let mean = instance.mean_of(query);
    Ok(sample_with_mean(instance, query, mean, rng))
}

pub(crate) fn sample_with_mean(
    instance: &Instance,
    query: AlternativeId,
    mean: f64,
    rng: &mut ChaCha8Rng,
) -> RewardSample {
    let value = match instance.noise_mode {
        NoiseMode::Deterministic => mean,
        NoiseMode::TwoPoint => two_point(mean, rng),
        NoiseMode::SqSample => match (instance.sq_data(), instance.payload(query)) {
            (Some(sq), AltPayload::Hypothesis(h)) => {
                let target_h = match instance.payload(instance.target) {
                    AltPayload::Hypothesis(t) => *t,
                    _ => unreachable!("sq instance target carries a hypothesis payload"),
                };
                let x = sample_index(&sq.dist, rng);
                f64::from(sq.hypotheses[*h][x] * sq.hypotheses[target_h][x])
            }
            // Fall back to the two-point law when the sample data is absent.
            _ => two_point(mean, rng),
        },
    };
    RewardSample { value, mean }
}

fn two_point(mean: f64, rng: &mut ChaCha8Rng) -> f64 {
    let p_plus = (1.0 + mean) / 2.0;
    if rng.random::<f64>() < p_plus {
        1.0
    } else {
        -1.0
    }
}

fn sample_index(dist: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    dist.len() - 1
}

/// One (query, reward) entry visible to learners.
#[derive(Debug, Clone, Copy)]
pub struct HistoryEntry {
    pub query: AlternativeId,
    pub reward: f64,
}

/// The learner side of the protocol. `select` must be deterministic given
/// the history and the learner's injected seed; `observe` is the only
/// state mutation between steps.
pub trait Learner {
    fn select(&mut self, history: &[HistoryEntry]) -> AlternativeId;
    fn observe(&mut self, reward: f64);
    /// Optional output hook for estimation-style wrappers.
    fn finalize(&self) -> Option<AlternativeId> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptStep {
    /// 1-based step index.
    pub t: usize,
    pub query: AlternativeId,
    pub reward: RewardSample,
    pub mean: f64,
    /// alpha - mean, signed.
    pub raw_gap: f64,
    /// alpha - mean clipped below at zero, for reporting.
    pub suboptimality: f64,
}

/// The ordered log of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub steps: Vec<TranscriptStep>,
    pub alpha_used: f64,
    pub seed: u64,
    pub instance_ref: Metadata,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl Transcript {
    /// CSV with columns t, query_index, reward, mean, raw_gap.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,query_index,reward,mean,raw_gap\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.t, s.query.0, s.reward.value, s.mean, s.raw_gap
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Signed total regret: sum of raw gaps (the contractual value; the
/// clipped per-step suboptimality is only for plots).
pub fn regret(transcript: &Transcript) -> f64 {
    transcript.steps.iter().map(|s| s.raw_gap).sum()
}

/// Runs the interaction loop against the instance's own target.
pub fn run_protocol(
    instance: &Instance,
    learner: &mut dyn Learner,
    t_steps: usize,
    alpha: f64,
    seed: u64,
) -> Result<Transcript> {
    if t_steps == 0 {
        return Err(Error::invalid("T must be at least 1"));
    }
    let mut warnings = Vec::new();
    if alpha > instance.alpha_star() {
        warnings.push(format!(
            "alpha = {alpha} exceeds alpha_star = {}; run continues",
            instance.alpha_star()
        ));
    }
    run_loop(instance, None, learner, t_steps, alpha, seed, warnings)
}

/// Runs the loop with reward means supplied by an external environment
/// (used by experiments whose ground truth is not a member of the
/// learner's alternative set). `means[z]` is the reward mean of
/// alternative z.
pub fn run_with_means(
    instance: &Instance,
    means: &[f64],
    learner: &mut dyn Learner,
    t_steps: usize,
    alpha: f64,
    seed: u64,
) -> Result<Transcript> {
    if t_steps == 0 {
        return Err(Error::invalid("T must be at least 1"));
    }
    if means.len() != instance.len() {
        return Err(Error::invalid("means length must equal |Z|"));
    }
    run_loop(
        instance,
        Some(means),
        learner,
        t_steps,
        alpha,
        seed,
        Vec::new(),
    )
}

fn run_loop(
    instance: &Instance,
    means: Option<&[f64]>,
    learner: &mut dyn Learner,
    t_steps: usize,
    alpha: f64,
    seed: u64,
    warnings: Vec<String>,
) -> Result<Transcript> {
    let mut rng = rng_for(seed, STREAM_REWARDS);
    let mut history: Vec<HistoryEntry> = Vec::with_capacity(t_steps);
    let mut steps = Vec::with_capacity(t_steps);
    for t in 1..=t_steps {
        let query = learner.select(&history);
        if query.0 >= instance.len() {
            return Err(Error::ProtocolAbort {
                step: t,
                message: format!("learner returned invalid id {}", query.0),
                partial: Box::new(Transcript {
                    steps,
                    alpha_used: alpha,
                    seed,
                    instance_ref: instance.metadata.clone(),
                    warnings,
                }),
            });
        }
        let mean = match means {
            Some(m) => m[query.0],
            None => instance.mean_of(query),
        };
        let reward = sample_with_mean(instance, query, mean, &mut rng);
        learner.observe(reward.value);
        history.push(HistoryEntry {
            query,
            reward: reward.value,
        });
        let raw_gap = alpha - mean;
        steps.push(TranscriptStep {
            t,
            query,
            reward,
            mean,
            raw_gap,
            suboptimality: raw_gap.max(0.0),
        });
    }
    Ok(Transcript {
        steps,
        alpha_used: alpha,
        seed,
        instance_ref: instance.metadata.clone(),
        warnings,
    })
}

/// Convenience: shared handle used by learners that must evaluate rho
/// during select/observe.
pub type InstanceRef = Arc<Instance>;
