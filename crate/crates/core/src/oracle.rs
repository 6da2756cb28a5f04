//! Online square-loss regression oracles over the finite predictor family
//! Phi = {phi_z : z in Z}, phi_z(z') = rho(z'|z).
//!
//! The aggregating kind keeps one exponential weight per predictor and
//! predicts the weight-mean of the predictor values; with eta = 1/8 the
//! square loss on [-1,1] is exp-concave, so its cumulative regret against
//! the best fixed predictor never exceeds ln|Phi|/eta = 8 ln|Phi| on any
//! response sequence. follow_the_leader is a baseline with no guarantee.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{AlternativeId, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Aggregating,
    FollowTheLeader,
}

/// State of an online regression oracle over an instance's predictor family.
#[derive(Debug, Clone)]
pub struct RegressionOracle {
    kind: OracleKind,
    eta: f64,
    /// Aggregating: log-weights (normalization is explicit at prediction time).
    log_weights: Vec<f64>,
    /// Follow-the-leader: cumulative square loss per predictor.
    losses: Vec<f64>,
    step_count: usize,
}

/// The conservative exp-concavity rate for square loss on [-1, 1].
pub const DEFAULT_ETA: f64 = 1.0 / 8.0;

impl RegressionOracle {
    pub fn new(kind: OracleKind, family_size: usize, eta: f64) -> Result<Self> {
        if family_size == 0 {
            return Err(Error::construction("predictor family must be nonempty"));
        }
        if kind == OracleKind::Aggregating && eta <= 0.0 {
            return Err(Error::construction(format!(
                "aggregating oracle requires eta > 0, got {eta}"
            )));
        }
        Ok(RegressionOracle {
            kind,
            eta,
            log_weights: vec![0.0; family_size],
            losses: vec![0.0; family_size],
            step_count: 0,
        })
    }

    pub fn aggregating(instance: &Instance, eta: f64) -> Result<Self> {
        Self::new(OracleKind::Aggregating, instance.len(), eta)
    }

    pub fn follow_the_leader(instance: &Instance) -> Result<Self> {
        Self::new(OracleKind::FollowTheLeader, instance.len(), 0.0)
    }

    pub fn kind(&self) -> OracleKind {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    /// Normalized weight of predictor `z` (aggregating kind).
    pub fn weight_share(&self, z: usize) -> f64 {
        let m = self
            .log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = self.log_weights.iter().map(|&w| (w - m).exp()).sum();
        (self.log_weights[z] - m).exp() / total
    }

    /// Predicts rhohat for `observation`; pure given the state.
    pub fn predict(&self, observation: AlternativeId, instance: &Instance) -> f64 {
        debug_assert_eq!(self.log_weights.len(), instance.len());
        match self.kind {
            OracleKind::Aggregating => {
                let m = self
                    .log_weights
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let mut num = 0.0;
                let mut den = 0.0;
                for z in 0..instance.len() {
                    let w = (self.log_weights[z] - m).exp();
                    num += w * instance.eval_unchecked(observation.0, z);
                    den += w;
                }
                (num / den).clamp(-1.0, 1.0)
            }
            OracleKind::FollowTheLeader => {
                let mut best = 0usize;
                for z in 1..self.losses.len() {
                    if self.losses[z] < self.losses[best] {
                        best = z;
                    }
                }
                instance
                    .eval_unchecked(observation.0, best)
                    .clamp(-1.0, 1.0)
            }
        }
    }

    /// Feeds the response for `observation` into the oracle.
    pub fn update(&mut self, observation: AlternativeId, response: f64, instance: &Instance) {
        debug_assert!((-1.0..=1.0).contains(&response));
        for z in 0..instance.len() {
            let pred = instance.eval_unchecked(observation.0, z);
            let loss = (pred - response) * (pred - response);
            match self.kind {
                OracleKind::Aggregating => self.log_weights[z] -= self.eta * loss,
                OracleKind::FollowTheLeader => self.losses[z] += loss,
            }
        }
        self.step_count += 1;
    }

    /// Realized regret of this oracle configuration on a full history:
    /// cumulative oracle square loss minus the best fixed predictor's loss.
    /// Replays the history on a fresh state of the same kind and rate.
    pub fn regret_sq(&self, history: &[(AlternativeId, f64)], instance: &Instance) -> f64 {
        let mut fresh =
            RegressionOracle::new(self.kind, instance.len(), self.eta).expect("same-config oracle");
        let mut oracle_loss = 0.0;
        for &(z, r) in history {
            let p = fresh.predict(z, instance);
            oracle_loss += (p - r) * (p - r);
            fresh.update(z, r, instance);
        }
        let mut best = f64::INFINITY;
        for cand in 0..instance.len() {
            let mut loss = 0.0;
            for &(z, r) in history {
                let pred = instance.eval_unchecked(z.0, cand);
                loss += (pred - r) * (pred - r);
            }
            best = best.min(loss);
        }
        oracle_loss - best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{AltPayload, Metadata, NoiseMode};

    fn dense(table: Vec<f64>, n: usize) -> Instance {
        Instance::from_dense(
            vec![AltPayload::None; n],
            table,
            AlternativeId(0),
            NoiseMode::TwoPoint,
            Metadata::default(),
        )
        .unwrap()
    }

    #[test]
    fn singleton_family_predicts_its_row() {
        let inst = dense(vec![0.7], 1);
        let o = RegressionOracle::aggregating(&inst, DEFAULT_ETA).unwrap();
        assert_eq!(o.predict(AlternativeId(0), &inst), 0.7);
    }

    #[test]
    fn symmetric_family_predicts_zero_before_updates() {
        // rows +v and -v: phi_0(z) = rho(z|0), phi_1(z) = rho(z|1) = -rho(z|0)
        let inst = dense(vec![0.6, -0.6, -0.6, 0.6], 2);
        let o = RegressionOracle::aggregating(&inst, DEFAULT_ETA).unwrap();
        assert_eq!(o.predict(AlternativeId(0), &inst), 0.0);
        assert_eq!(o.predict(AlternativeId(1), &inst), 0.0);
    }

    #[test]
    fn follow_the_leader_tracks_empirical_best() {
        // Two predictors; 3-step history where predictor 1 has lower
        // cumulative square loss: responses 0.9 at observation 0.
        // phi_0(obs 0) = 1.0 -> per-step loss 0.01; phi_1(obs 0) = 0.5 -> 0.16.
        // So the leader is predictor 0; flip responses to -0.4 favors 1.
        let inst = dense(vec![1.0, 0.5, 0.2, -0.5], 2);
        let mut o = RegressionOracle::follow_the_leader(&inst).unwrap();
        for _ in 0..3 {
            o.update(AlternativeId(0), 0.9, &inst);
        }
        assert_eq!(o.predict(AlternativeId(1), &inst), 0.2); // phi_0 at obs 1

        let mut o2 = RegressionOracle::follow_the_leader(&inst).unwrap();
        for _ in 0..3 {
            // losses: phi_0: (1-(-0.4))^2 = 1.96; phi_1: (0.5+0.4)^2 = 0.81
            o2.update(AlternativeId(0), -0.4, &inst);
        }
        assert_eq!(o2.predict(AlternativeId(1), &inst), -0.5); // phi_1 at obs 1
    }

    #[test]
    fn zero_eta_rejected_at_construction() {
        let inst = dense(vec![0.0], 1);
        assert!(RegressionOracle::aggregating(&inst, 0.0).is_err());
    }

    #[test]
    fn zero_loss_predictor_keeps_maximal_weight() {
        let inst = dense(vec![1.0, 0.0, 0.0, 1.0], 2);
        let mut o = RegressionOracle::aggregating(&inst, DEFAULT_ETA).unwrap();
        o.update(AlternativeId(0), 1.0, &inst); // predictor 0 has zero loss
        assert!(o.weight_share(0) > o.weight_share(1));
    }

    #[test]
    fn noiseless_source_dominates_weights_after_ten_steps() {
        // Predictor 0 row is +1 everywhere, predictor 1 row is -1; responses
        // +1 noiselessly from predictor 0 give a per-step loss gap of 4, so
        // the weight ratio after 10 steps is exp(-10 * eta * 4) = exp(-5).
        let inst = dense(vec![1.0, -1.0, 1.0, -1.0], 2);
        let mut o = RegressionOracle::aggregating(&inst, DEFAULT_ETA).unwrap();
        for _ in 0..10 {
            o.update(AlternativeId(0), 1.0, &inst);
        }
        let share = o.weight_share(0);
        let expected = 1.0 / (1.0 + (-5.0f64).exp());
        assert!((share - expected).abs() < 1e-12);
        assert!(share > 0.99);
    }

    #[test]
    fn regret_is_zero_when_oracle_matches_best_predictor() {
        let inst = dense(vec![0.7], 1);
        let o = RegressionOracle::aggregating(&inst, DEFAULT_ETA).unwrap();
        let history = vec![(AlternativeId(0), 1.0), (AlternativeId(0), -1.0)];
        assert_eq!(o.regret_sq(&history, &inst), 0.0);
    }

    #[test]
    fn constant_oracle_pays_the_gap_against_a_perfect_predictor() {
        // Family {phi_0 = 0 row, phi_1 = 1 row}; responses all 1.0 at obs 0.
        // FTL starts at predictor 0 (tie, lowest index), then switches to
        // predictor 1 after one update; its realized regret is the one
        // unit-gap step: (0 - 1)^2 - 0 = 1.
        let inst = dense(vec![0.0, 1.0, 0.0, 1.0], 2);
        let o = RegressionOracle::follow_the_leader(&inst).unwrap();
        let history: Vec<_> = (0..5).map(|_| (AlternativeId(0), 1.0)).collect();
        let r = o.regret_sq(&history, &inst);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn exhaustive_small_adversary_respects_mixability_bound() {
        // Brute-force worst case over +/-1 response sequences and all
        // observation choices for a 4-predictor family, T = 6; the bound
        // 8 ln 4 must hold on every branch.
        let inst = dense(
            vec![
                1.0, -1.0, 0.5, -0.5, 0.5, 1.0, -1.0, 0.0, -0.5, 0.0, 1.0, 0.5, 0.0, 0.5, -0.5, 1.0,
            ],
            4,
        );
        let o = RegressionOracle::aggregating(&inst, DEFAULT_ETA).unwrap();
        let bound = 8.0 * 4.0f64.ln();
        let t = 6;
        let mut worst = f64::NEG_INFINITY;
        // Each step encodes (observation in 0..4, response in {-1, +1}).
        let branches = 8usize.pow(t);
        for code in 0..branches {
            let mut c = code;
            let mut history = Vec::with_capacity(t as usize);
            for _ in 0..t {
                let obs = c % 4;
                let resp = if (c / 4) % 2 == 0 { -1.0 } else { 1.0 };
                c /= 8;
                history.push((AlternativeId(obs), resp));
            }
            let r = o.regret_sq(&history, &inst);
            worst = worst.max(r);
        }
        assert!(
            worst <= bound,
            "worst-case regret {worst} exceeds bound {bound}"
        );
    }
}
